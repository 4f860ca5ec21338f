#pragma once

// Stochastic convolution z = S <> B for a diffusion B acting diagonally on the
// heat eigenbasis. Each mode is a scalar Ornstein-Uhlenbeck process, stepped
// with its exact Gaussian transition, so z is exact in distribution at the
// grid times.

#include <cstdint>
#include <vector>

#include "mildlab/semigroup.hpp"

namespace mildlab {

struct DiffusionSpec {
    /// b_k for k = 1..M (stored 0-based).
    std::vector<double> weights;
    /// Set when the weights came from c * k^(-gamma); informational only.
    double amplitude = 0.0;
    double smoothness = 0.0;
    bool power_law = false;

    static DiffusionSpec explicit_weights(std::vector<double> weights);
    /// b_k = c k^(-gamma).
    static DiffusionSpec from_power_law(std::size_t modes, double amplitude, double smoothness);
};

struct TimeGrid {
    double horizon;
    double delta;
    std::size_t steps;

    /// Throws InvalidTimeGrid unless delta divides T (relative slack 1e-9).
    static TimeGrid make(double horizon, double delta);
    double time(std::size_t n) const { return static_cast<double>(n) * delta; }
};

struct NoisePath {
    DiffusionSpec spec;
    TimeGrid time;
    std::uint64_t seed;
    /// Coarsening factor relative to the stream that generated the path.
    std::size_t stride = 1;
    /// modes[n][k] = z_k(t_n)
    std::vector<Modes> modes;
    std::vector<GridFunction> fields;

    std::size_t steps() const { return time.steps; }
    double delta() const { return time.delta; }
};

/// Standard normal draw for (mode, step) under `seed`.
///
/// Counter scheme: s = mix(mix(mix(seed) + G*(mode+1)) + G*(step+1)),
/// u_j = (mix(s + j) >> 11 + 1) * 2^-53 for j = 1, 2, and Box-Muller
/// sqrt(-2 ln u_1) cos(2 pi u_2), where mix is the splitmix64 finalizer and
/// G = 0x9E3779B97F4A7C15. Independent of evaluation order.
double stream_normal(std::uint64_t seed, std::uint64_t mode, std::uint64_t step);

NoisePath sample_path(const DiffusionSpec& spec, const HeatSemigroup& sg, double horizon, double delta,
                      std::uint64_t seed);

/// Every `factor`-th time of `path`; still exact in distribution.
NoisePath subsample(const NoisePath& path, std::size_t factor);

/// max over grid times of ||z(t_n)||_q.
double norm_c_lq(const NoisePath& path, double q);
/// (sum_{n<N} delta ||z(t_n)||_{qd}^d)^(1/d); 0 when d = 0.
double norm_ld_lqd(const NoisePath& path, double d, double q);

}  // namespace mildlab
