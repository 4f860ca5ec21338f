#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "mildlab/parallel.hpp"
#include "mildlab/verify.hpp"

using namespace mildlab;

TEST_CASE("report verdicts") {
    StudyReport r;
    r.finalize();
    CHECK(r.verdict == Verdict::inconclusive);  // nothing was checked

    r.require_at_most("small", 0.5, 1.0);
    r.require_at_least("large", 2.0, 1.0);
    r.finalize();
    CHECK(r.passed());
    r.inconclusive = true;
    r.finalize();
    CHECK(r.verdict == Verdict::inconclusive);
    r.require_at_most("too big", 2.0, 1.0);
    r.finalize();
    CHECK(r.verdict == Verdict::fail);
    CHECK(to_string(Verdict::fail) == "fail");

    auto& s = r.add_series("pts", {"x", "y"});
    s.rows.push_back({1.0, 0.1});
    r.add_series("more", {"z"}).rows.push_back({3.0});
    s.rows.push_back({2.0, 0.2});  // still valid after another add
    const auto j = to_json(r);
    CHECK(j["verdict"] == "fail");
    CHECK(j["thresholds"].size() == 3);
    const auto csv = series_csv(r);
    CHECK(csv.find("# pts") != std::string::npos);
    CHECK(csv.find("# more") != std::string::npos);
}

TEST_CASE("fitting helpers") {
    std::vector<double> x, y;
    for (double v : {0.5, 0.25, 0.125, 0.0625}) {
        x.push_back(v);
        y.push_back(3.0 * std::pow(v, 0.7));
    }
    CHECK(loglog_slope(x, y) == doctest::Approx(0.7));
    CHECK(seed_range(5, 3) == std::vector<std::uint64_t>{5, 6, 7});
}

TEST_CASE("parallel map keeps index order and propagates failures") {
    for (std::size_t w : {1u, 2u, 8u}) {
        const auto out = parallel_map(100, w, [](std::size_t i) { return i * i; });
        for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
    }
    CHECK(parallel_map(0, 4, [](std::size_t i) { return i; }).empty());
    CHECK_THROWS_AS(parallel_map(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                     return i;
                                 }),
                    std::runtime_error);
}

TEST_CASE("test drifts") {
    const auto d = test_drifts();
    REQUIRE(d.size() == 6);
    CHECK(d[4].name() == "sign");
    CHECK(d[3](2.0) == doctest::Approx(16.0));
}

TEST_CASE("chain rule with free decay of a single mode") {
    const HeatSemigroup sg(Grid(31), 1.0);
    const auto report = chain_rule_study(2.0, sg, [](double, double) { return 0.0; }, sg.eigenvector(1), 0.25,
                                         1.0 / 256.0);
    CHECK(report.passed());
}

TEST_CASE("cheap auxiliary studies pass") {
    CHECK(bernoulli_study(100, 3).passed());
    CHECK(eiconv_demo(64).passed());
}

TEST_CASE("zero drift is a degenerate pass") {
    const HeatSemigroup sg(Grid(15), 1.0);
    StudyContext ctx{sg,
                     DiffusionSpec::from_power_law(15, 1.0, 1.0),
                     1.0,
                     1.0 / 64.0,
                     seed_range(1, 2),
                     SolverConfig{},
                     GridFunction::from_function(sg.grid(), [](double x) { return std::sin(3.0 * x); }),
                     2.0,
                     1};
    const auto zero = MonotoneGraph::zero();
    CHECK(apriori_bound_study(zero, {2.0}, ctx).passed());
    CHECK(mild_identity_study(zero, 1e-4, 0.999, ctx).passed());
    CHECK(contraction_study(zero, GridFunction(sg.grid()), ctx).passed());
    CHECK(cauchy_rate_study(zero, 2.0, ctx).verdict != Verdict::fail);
}

TEST_CASE("moment bound scales with the data") {
    const HeatSemigroup sg(Grid(15), 1.0);
    // no noise: the sup-norm functional is deterministic and 1-homogeneous for linear drift
    StudyContext ctx{sg,
                     DiffusionSpec::explicit_weights(std::vector<double>(15, 0.0)),
                     1.0,
                     1.0 / 64.0,
                     seed_range(1, 100),
                     SolverConfig{},
                     GridFunction::from_function(sg.grid(), [](double x) { return std::sin(3.0 * x); }),
                     2.0,
                     1};
    ctx.solver.lambda_schedule = {0.25, 0.125};
    const auto one = moment_study(MonotoneGraph::linear(1.0), 2.0, 1.0, ctx);
    ctx.u0 = 2.0 * ctx.u0;
    const auto two = moment_study(MonotoneGraph::linear(1.0), 2.0, 1.0, ctx);
    REQUIRE(one.series.size() == two.series.size());
    const auto& a = one.series.front().rows;
    const auto& b = two.series.front().rows;
    REQUIRE(a.size() == b.size());
    CHECK(b[0][1] == doctest::Approx(2.0 * a[0][1]));
}
