#include "doctest.h"

#include <cmath>

#include "mildlab/solver.hpp"

using namespace mildlab;

namespace {

DiffusionSpec silent(std::size_t m) { return DiffusionSpec::explicit_weights(std::vector<double>(m, 0.0)); }

}  // namespace

TEST_CASE("schedule and config validation") {
    const auto s = geometric_schedule(0.5, 4);
    REQUIRE(s.size() == 4);
    CHECK(s[3] == doctest::Approx(0.0625));
    SolverConfig c;
    CHECK_NOTHROW(c.validate());
    c.r = 3.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c.r = 2.0;
    c.lambda_schedule = {0.1, 0.2};
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("zero drift is the linear solution") {
    const HeatSemigroup sg(Grid(31), 1.0);
    const auto path = sample_path(DiffusionSpec::from_power_law(31, 1.0, 1.0), sg, 1.0, 1.0 / 64.0, 4);
    const auto u0 = GridFunction::from_function(sg.grid(), [](double x) { return x * (1.0 - x) * 4.0; });
    const auto u = solve_regularized(MonotoneGraph::zero(), 0.1, u0, path, sg);
    for (std::size_t n = 0; n < u.size(); n += 7) {
        const auto expect = sg.apply_semigroup(u0, path.time.time(n)) + path.fields[n];
        CHECK(max_norm(u[n] - expect) <= 1e-12);
    }
    const auto mild = solve_mild(MonotoneGraph::zero(), u0, path, sg, SolverConfig{});
    CHECK(mild.converged);
    CHECK(mild.levels.size() == 1);
    CHECK(*mild.levels[0].gap == 0.0);
    CHECK(mild.residual <= 1e-12);
}

TEST_CASE("rest state") {
    const HeatSemigroup sg(Grid(15), 1.0);
    const auto path = sample_path(silent(15), sg, 1.0, 1.0 / 32.0, 1);
    for (const auto& f : {MonotoneGraph::cubic(), MonotoneGraph::sign(), MonotoneGraph::sign_plus_linear()}) {
        const auto u = solve_regularized(f, 0.01, GridFunction(sg.grid()), path, sg);
        for (const auto& un : u) CHECK(max_norm(un) == 0.0);
        for (const auto& g : extract_g(u, f, 0.01)) CHECK(max_norm(g) == 0.0);
    }
}

TEST_CASE("linear drift against a modewise recursion and the exact decay") {
    const HeatSemigroup sg(Grid(15), 1.0);
    const double c = 3.0, lambda = 0.05;
    const std::size_t k = 1;
    const GridFunction u0 = sg.eigenvector(k);
    const double mu = sg.eigenvalue(k);

    // exact heat step followed by the implicit step of c x / (1 + lambda c)
    const double delta = 1.0 / 64.0;
    const auto path = sample_path(silent(15), sg, 1.0, delta, 1);
    const auto u = solve_regularized(MonotoneGraph::linear(c), lambda, u0, path, sg);
    const double c_lambda = c / (1.0 + lambda * c);
    double a = 1.0;
    for (std::size_t n = 1; n < u.size(); ++n) {
        a *= std::exp(-mu * delta) / (1.0 + delta * c_lambda);
        CHECK(sg.to_modes(u[n])[k] == doctest::Approx(a).epsilon(1e-11));
    }

    // first order in delta against exp(-(mu + c) t) once lambda is negligible
    auto error = [&](double dt) {
        const auto p = sample_path(silent(15), sg, 1.0, dt, 1);
        const auto v = solve_regularized(MonotoneGraph::linear(c), 1e-12, u0, p, sg);
        double worst = 0.0;
        for (std::size_t n = 0; n < v.size(); ++n)
            worst = std::max(worst, std::abs(sg.to_modes(v[n])[k] - std::exp(-(mu + c) * p.time.time(n))));
        return worst;
    };
    const double ratio = error(1.0 / 256.0) / error(1.0 / 512.0);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
}

TEST_CASE("extract_g") {
    const Grid g(7);
    const Trajectory two(3, GridFunction(g, std::vector<double>(7, 2.0)));
    for (const auto& gn : extract_g(two, MonotoneGraph::cubic(), 1e-6))
        for (double v : gn.values()) CHECK(std::abs(v - 8.0) <= 1e-4);
    const Trajectory half(2, GridFunction(g, std::vector<double>(7, 0.5)));
    for (const auto& gn : extract_g(half, MonotoneGraph::sign(), 1.0))
        for (double v : gn.values()) CHECK(v == doctest::Approx(0.5));
}

TEST_CASE("continuation for the cubic drift") {
    const HeatSemigroup sg(Grid(31), 1.0);
    const auto path = sample_path(DiffusionSpec::from_power_law(31, 1.0, 2.0), sg, 1.0, 1.0 / 256.0, 7);
    const auto u0 = GridFunction::from_function(sg.grid(), [](double x) { return std::sin(std::acos(-1.0) * x); });
    SolverConfig cfg;
    cfg.lambda_schedule = geometric_schedule(0.25, 7);
    cfg.cauchy_tol = 1e-12;
    const auto sol = solve_mild(MonotoneGraph::cubic(), u0, path, sg, cfg);
    CHECK_FALSE(sol.converged);
    REQUIRE(sol.levels.size() == 7);
    std::vector<double> lambdas, gaps;
    for (std::size_t j = 1; j < sol.levels.size(); ++j) {
        if (j > 1) CHECK(*sol.levels[j].gap < *sol.levels[j - 1].gap);
        lambdas.push_back(sol.levels[j].lambda);
        gaps.push_back(*sol.levels[j].gap);
    }
    // rate at least 1/q = 1/2 up to the study slack
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double x = std::log(lambdas[i]), y = std::log(gaps[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double n = static_cast<double>(gaps.size());
    CHECK((n * sxy - sx * sy) / (n * sxx - sx * sx) >= 0.35);

    // paired run: contraction in L^2
    const GridFunction u1 = 0.3 * u0;
    const auto other = solve_mild(MonotoneGraph::cubic(), u1, path, sg, cfg);
    CHECK(sup_distance(sol.u, other.u, 2.0) <= lq_norm(u0 - u1, 2.0) * (1.0 + 1e-10));
}

TEST_CASE("residual of the mild identity") {
    const HeatSemigroup sg(Grid(31), 1.0);
    const auto u0 = GridFunction::from_function(sg.grid(), [](double x) { return 2.0 * std::sin(std::acos(-1.0) * x); });
    const auto spec = DiffusionSpec::from_power_law(31, 1.0, 2.0);
    auto residual = [&](double delta) {
        const auto path = sample_path(spec, sg, 1.0, delta, 3);
        const auto u = solve_regularized(MonotoneGraph::cubic(), 1e-3, u0, path, sg);
        return residual_check(u, extract_g(u, MonotoneGraph::cubic(), 1e-3), u0, path, sg, 2.0);
    };
    const double ratio = residual(1.0 / 256.0) / residual(1.0 / 512.0);
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);

    const auto path = sample_path(spec, sg, 1.0, 1.0 / 64.0, 3);
    const auto u = solve_regularized(MonotoneGraph::zero(), 1.0, u0, path, sg);
    Trajectory g(u.size(), GridFunction(sg.grid()));
    CHECK(residual_check(u, g, u0, path, sg, 2.0) <= 1e-12);
    g[10][4] = 0.5;
    CHECK(residual_check(u, g, u0, path, sg, 2.0) > 1e-6);
}

TEST_CASE("inclusion fraction") {
    const Grid grid(9);
    std::vector<double> vals = {-2.0, -1.0, -0.1, 0.0, 0.0, 0.3, 1.0, 1.5, 3.0};
    const Trajectory u(4, GridFunction(grid, vals));
    const auto sgn = MonotoneGraph::sign();
    const auto cub = MonotoneGraph::cubic();
    Trajectory g_sgn, g_cub, g_off;
    for (const auto& un : u) {
        GridFunction a(grid), b(grid);
        for (std::size_t i = 0; i < 9; ++i) {
            a[i] = section(sgn, un[i], Section::mid);
            b[i] = section(cub, un[i], Section::mid);
        }
        g_sgn.push_back(a);
        g_cub.push_back(b);
        GridFunction shifted = b;
        for (auto& v : shifted.values()) v += 1.0;
        g_off.push_back(shifted);
    }
    CHECK(inclusion_check(u, g_sgn, sgn, 1e-10) == 1.0);
    CHECK(inclusion_check(u, g_cub, cub, 1e-10) == 1.0);
    CHECK(inclusion_check(u, g_off, cub, 1e-2) <= 0.01);
}

TEST_CASE("critical exponent") {
    CHECK(qstar(2.0, 2.0, 3.0) == 6.0);
    CHECK(qstar(1.5, 1.5, 3.0) == doctest::Approx(4.5));
    CHECK(qstar(4.0, 1.0, 1.0) == 4.0);
    CHECK_THROWS_AS(qstar(1.0, 1.0, 1.0), InvalidExponent);
    CHECK_THROWS_AS(qstar(2.0, 3.0, 1.0), InvalidExponent);
}
