#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "mildlab/scalar_monotone.hpp"

using namespace mildlab;

namespace {

// Real root of y + lambda y^3 = x (Cardano; the cubic is strictly increasing).
double cubic_resolvent_oracle(double lambda, double x) {
    const double p = 1.0 / lambda;
    const double q = -x / lambda;
    const double disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    return std::cbrt(-q / 2.0 + disc) + std::cbrt(-q / 2.0 - disc);
}

double sign_resolvent_oracle(double lambda, double x) {
    if (x > lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

// min over y of (x - y)^2 / (2 lambda) + phi(y), by dense scan then golden refine.
template <class Phi>
double brute_envelope(const Phi& phi, double lambda, double x) {
    auto obj = [&](double y) { return (x - y) * (x - y) / (2.0 * lambda) + phi(y); };
    double best_y = x;
    double best = obj(x);
    for (int i = -40000; i <= 40000; ++i) {
        const double y = x + 4.0 * i / 40000.0;
        if (obj(y) < best) {
            best = obj(y);
            best_y = y;
        }
    }
    double a = best_y - 1e-4, b = best_y + 1e-4;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double c = b - g * (b - a), d = a + g * (b - a);
        if (obj(c) < obj(d)) b = d; else a = c;
    }
    return std::min(best, obj(0.5 * (a + b)));
}

}  // namespace

TEST_CASE("section picks the requested element of the filled graph") {
    const auto sgn = MonotoneGraph::sign();
    CHECK(section(sgn, 0.0, Section::mid) == 0.0);
    CHECK(section(sgn, 0.0, Section::max) == 1.0);
    CHECK(section(sgn, 0.0, Section::min) == -1.0);
    CHECK(section(sgn, 0.0, Section::min_abs) == 0.0);
    CHECK(std::abs(section(sgn, 0.0, Section::max_abs)) == 1.0);
    CHECK(section(MonotoneGraph::cubic(), 2.0, Section::mid) == doctest::Approx(8.0));
    const auto spl = MonotoneGraph::sign_plus_linear();
    CHECK(section(spl, 0.0, Section::min) == -1.0);
    CHECK(section(spl, 0.5, Section::mid) == doctest::Approx(1.5));
}

TEST_CASE("resolvent matches closed forms") {
    CHECK(resolvent(MonotoneGraph::linear(1.0), 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(resolvent(MonotoneGraph::sign(), 0.5, 0.2)) <= 1e-12);
    CHECK(std::abs(resolvent(MonotoneGraph::sign(), 0.5, 0.0)) <= 1e-12);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> ux(-10.0, 10.0), ul(-6.0, 1.0);
    const auto sgn = MonotoneGraph::sign();
    const auto cub = MonotoneGraph::cubic();
    for (int i = 0; i < 500; ++i) {
        const double x = ux(rng);
        const double lambda = std::pow(10.0, ul(rng));
        CHECK(resolvent(sgn, lambda, x) == doctest::Approx(sign_resolvent_oracle(lambda, x)).epsilon(1e-10));
        const double y = cubic_resolvent_oracle(lambda, x);
        CHECK(std::abs(resolvent(cub, lambda, x) - y) <= 1e-10 * (1.0 + std::abs(y)));
    }
}

TEST_CASE("yosida approximation") {
    const auto sgn = MonotoneGraph::sign();
    CHECK(yosida(YosidaView(sgn, 0.5), 0.2) == doctest::Approx(0.4));
    CHECK(yosida(YosidaView(sgn, 0.5), 3.0) == doctest::Approx(1.0));
    CHECK(yosida(YosidaView(sgn, 0.5), -3.0) == doctest::Approx(-1.0));
    CHECK(yosida(YosidaView(MonotoneGraph::linear(1.0), 1.0), 2.0) == doctest::Approx(1.0));
    // c x / (1 + lambda c)
    CHECK(yosida(YosidaView(MonotoneGraph::linear(4.0), 0.25), 3.0) == doctest::Approx(6.0));
}

TEST_CASE("yosida of yosida shifts the index") {
    const auto cub = MonotoneGraph::cubic();
    const double lambda = 0.3, mu = 0.05;
    for (double x : {-4.0, -0.7, 0.0, 0.4, 2.5}) {
        auto f_lambda = [&](double y) { return yosida(YosidaView(cub, lambda, 1e-14), y); };
        const double lhs = yosida_of(f_lambda, mu, x, 1e-14);
        const double rhs = yosida(YosidaView(cub, lambda + mu, 1e-14), x);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("primitive") {
    CHECK(primitive(MonotoneGraph::cubic(), 2.0) == doctest::Approx(4.0).epsilon(1e-10));
    for (const auto& g : {MonotoneGraph::sign(), MonotoneGraph::cubic(), MonotoneGraph::odd_power(1.5)})
        CHECK(primitive(g, 0.0) == 0.0);
    CHECK(primitive(MonotoneGraph::sign(), -3.0) == doctest::Approx(3.0));
    CHECK(primitive(MonotoneGraph::sign_plus_linear(), 2.0) == doctest::Approx(4.0));
    CHECK(primitive(MonotoneGraph::odd_power(1.5), 4.0) == doctest::Approx(std::pow(4.0, 2.5) / 2.5).epsilon(1e-10));
}

TEST_CASE("moreau envelope against direct minimization") {
    const auto lin = MonotoneGraph::linear(1.0);
    CHECK(moreau(YosidaView(lin, 1.0), 2.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(brute_envelope([](double y) { return 0.5 * y * y; }, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-8));

    const auto sgn = MonotoneGraph::sign();
    for (double x : {0.5, -0.2, 1.7}) {
        const double oracle = brute_envelope([](double y) { return std::abs(y); }, 1.0, x);
        CHECK(std::abs(moreau(YosidaView(sgn, 1.0), x) - oracle) <= 1e-6);
    }
    const auto cub = MonotoneGraph::cubic();
    const double oracle = brute_envelope([](double y) { return y * y * y * y / 4.0; }, 0.2, 1.3);
    CHECK(std::abs(moreau(YosidaView(cub, 0.2), 1.3) - oracle) <= 1e-6);
}

TEST_CASE("graph construction is validated") {
    CHECK_THROWS_AS(MonotoneGraph::piecewise({}, {Branch{0.0, -1.0, 0.0, 1.0}}, 1.0, 1.0), InvalidGraph);
    // decreasing across a breakpoint
    CHECK_THROWS_AS(MonotoneGraph::piecewise({0.0}, {Branch{1.0}, Branch{-1.0}}, 0.0, 1.0), InvalidGraph);
    CHECK_THROWS_AS(MonotoneGraph::piecewise({1.0, 0.0}, {Branch{}, Branch{}, Branch{}}, 0.0, 1.0), InvalidGraph);
    // growth bound too small for a cubic
    CHECK_THROWS_AS(MonotoneGraph::piecewise({}, {Branch{0, 0, 1.0, 3.0}}, 1.0, 1.0), InvalidGraph);
    CHECK_THROWS_AS(MonotoneGraph::odd_power(0.0), InvalidGraph);

    const auto g = MonotoneGraph::piecewise({-1.0, 1.0}, {Branch{-2.0}, Branch{0, 1.0}, Branch{3.0}}, 0.0, 3.0);
    REQUIRE(g.jump_points().size() == 2);
    CHECK(g.left_limit(1.0) == doctest::Approx(1.0));
    CHECK(g.right_limit(1.0) == doctest::Approx(3.0));
    CHECK(g(1.0) == doctest::Approx(3.0));
    CHECK(g.zero_in_graph());
}

TEST_CASE("non-finite input is rejected") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(resolvent(MonotoneGraph::cubic(), 0.5, nan), NonFiniteInput);
}

TEST_CASE("graph distance") {
    const auto sgn = MonotoneGraph::sign();
    CHECK(graph_distance(sgn, 0.0, 0.3) == 0.0);
    CHECK(vertical_distance(sgn, 2.0, 0.5) == doctest::Approx(0.5));
    // (0.1, 0) is 0.1 away horizontally from the vertical segment at 0
    CHECK(graph_distance(sgn, 0.1, 0.0) == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(graph_distance(MonotoneGraph::cubic(), 2.0, 8.0) <= 1e-12);
}
