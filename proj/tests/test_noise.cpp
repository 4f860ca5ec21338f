#include "doctest.h"

#include <cmath>
#include <cstring>

#include "mildlab/noise.hpp"

using namespace mildlab;

namespace {

bool bit_identical(const NoisePath& a, const NoisePath& b) {
    if (a.modes.size() != b.modes.size()) return false;
    for (std::size_t n = 0; n < a.modes.size(); ++n)
        if (std::memcmp(a.modes[n].data(), b.modes[n].data(), a.modes[n].size() * sizeof(double)) != 0) return false;
    return true;
}

NoisePath constant_path(const HeatSemigroup& sg, const GridFunction& z, double horizon, double delta) {
    NoisePath path{DiffusionSpec::from_power_law(sg.grid().size(), 1.0, 1.0), TimeGrid::make(horizon, delta), 0, 1, {}, {}};
    for (std::size_t n = 0; n <= path.time.steps; ++n) {
        path.modes.push_back(sg.to_modes(z));
        path.fields.push_back(z);
    }
    return path;
}

}  // namespace

TEST_CASE("time grid") {
    const auto tg = TimeGrid::make(1.0, 1.0 / 64.0);
    CHECK(tg.steps == 64);
    CHECK(tg.time(32) == doctest::Approx(0.5));
    CHECK_THROWS_AS(TimeGrid::make(1.0, 0.3), InvalidTimeGrid);
    CHECK_THROWS_AS(TimeGrid::make(1.0, 0.0), InvalidTimeGrid);
    CHECK_THROWS_AS(TimeGrid::make(-1.0, 0.1), InvalidTimeGrid);
}

TEST_CASE("diffusion weights") {
    const auto spec = DiffusionSpec::from_power_law(4, 2.0, 1.0);
    CHECK(spec.weights[0] == doctest::Approx(2.0));
    CHECK(spec.weights[3] == doctest::Approx(0.5));
    CHECK_THROWS_AS(DiffusionSpec::explicit_weights({1.0, -1.0}), InvalidArgument);
}

TEST_CASE("counter-based normal stream") {
    CHECK(stream_normal(3, 1, 2) == stream_normal(3, 1, 2));
    CHECK(stream_normal(3, 1, 2) != stream_normal(3, 2, 1));
    CHECK(stream_normal(3, 1, 2) != stream_normal(4, 1, 2));
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = stream_normal(17, static_cast<std::uint64_t>(i % 7), static_cast<std::uint64_t>(i / 7));
        s += x;
        s2 += x * x;
        s4 += x * x * x * x;
    }
    CHECK(std::abs(s / n) <= 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) <= 5.0 * std::sqrt(2.0 / n));
    CHECK(std::abs(s4 / n - 3.0) <= 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("sample path") {
    const HeatSemigroup sg(Grid(15), 1.0);
    const auto zero = DiffusionSpec::explicit_weights(std::vector<double>(15, 0.0));
    const auto p0 = sample_path(zero, sg, 1.0, 1.0 / 32.0, 5);
    for (const auto& z : p0.fields) CHECK(max_norm(z) == 0.0);

    const auto spec = DiffusionSpec::from_power_law(15, 1.0, 1.0);
    const auto a = sample_path(spec, sg, 1.0, 1.0 / 32.0, 9);
    const auto b = sample_path(spec, sg, 1.0, 1.0 / 32.0, 9);
    const auto c = sample_path(spec, sg, 1.0, 1.0 / 32.0, 10);
    CHECK(bit_identical(a, b));
    CHECK_FALSE(bit_identical(a, c));
    CHECK(max_norm(a.fields[0]) == 0.0);
    REQUIRE(a.fields.size() == 33);

    // one exact OU step per mode, rebuilt from the documented draw indices
    const double delta = 1.0 / 32.0;
    for (std::size_t k : {0u, 6u}) {
        const double mu = sg.eigenvalue(k);
        double z = 0.0;
        for (std::size_t n = 0; n < 32; ++n)
            z = std::exp(-mu * delta) * z +
                spec.weights[k] * std::sqrt((1.0 - std::exp(-2.0 * mu * delta)) / (2.0 * mu)) * stream_normal(9, k, n);
        CHECK(a.modes[32][k] == doctest::Approx(z).epsilon(1e-12));
    }
    CHECK_THROWS_AS(sample_path(spec, sg, 1.0, 0.3, 1), InvalidTimeGrid);
    CHECK_THROWS_AS(sample_path(DiffusionSpec::from_power_law(7, 1.0, 1.0), sg, 1.0, delta, 1), GridMismatch);
}

TEST_CASE("subsampling keeps the same Brownian path") {
    const HeatSemigroup sg(Grid(7), 1.0);
    const auto spec = DiffusionSpec::from_power_law(7, 1.0, 0.5);
    const auto fine = sample_path(spec, sg, 1.0, 1.0 / 64.0, 3);
    const auto coarse = subsample(fine, 4);
    CHECK(coarse.steps() == 16);
    CHECK(coarse.delta() == doctest::Approx(1.0 / 16.0));
    for (std::size_t n = 0; n <= 16; ++n) CHECK(coarse.modes[n] == fine.modes[4 * n]);
    CHECK_THROWS_AS(subsample(fine, 3), InvalidTimeGrid);
}

TEST_CASE("path norms") {
    const HeatSemigroup sg(Grid(15), 1.0);
    const auto zero = DiffusionSpec::explicit_weights(std::vector<double>(15, 0.0));
    const auto p0 = sample_path(zero, sg, 1.0, 0.125, 1);
    CHECK(norm_c_lq(p0, 2.0) == 0.0);
    CHECK(norm_ld_lqd(p0, 3.0, 2.0) == 0.0);

    const auto z = GridFunction::from_function(sg.grid(), [](double x) { return std::sin(3.0 * x) - 0.2; });
    const auto pc = constant_path(sg, z, 0.5, 0.125);
    CHECK(norm_c_lq(pc, 3.0) == doctest::Approx(lq_norm(z, 3.0)));
    CHECK(norm_ld_lqd(pc, 1.0, 2.0) == doctest::Approx(0.5 * lq_norm(z, 2.0)));
    CHECK(norm_ld_lqd(pc, 0.0, 2.0) == 0.0);
    // d = 2, q = 1.5: (T ||z||_3^2)^(1/2)
    CHECK(norm_ld_lqd(pc, 2.0, 1.5) == doctest::Approx(std::sqrt(0.5) * lq_norm(z, 3.0)));
    CHECK_THROWS_AS(norm_ld_lqd(pc, -1.0, 2.0), InvalidExponent);

    const auto spec = DiffusionSpec::from_power_law(15, 1.0, 1.0);
    const auto p = sample_path(spec, sg, 1.0, 1.0 / 16.0, 2);
    double best = 0.0;
    for (const auto& f : p.fields) best = std::max(best, lq_norm(f, 2.0));
    CHECK(norm_c_lq(p, 2.0) == best);
}
