#include "mildlab/noise.hpp"

#include <cmath>
#include <numbers>

namespace mildlab {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double unit_open(std::uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }

}  // namespace

DiffusionSpec DiffusionSpec::explicit_weights(std::vector<double> weights) {
    for (double b : weights)
        if (!std::isfinite(b) || b < 0.0) throw InvalidArgument("DiffusionSpec: weights must be finite and >= 0");
    DiffusionSpec s;
    s.weights = std::move(weights);
    return s;
}

DiffusionSpec DiffusionSpec::from_power_law(std::size_t modes, double amplitude, double smoothness) {
    if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw InvalidArgument("DiffusionSpec: amplitude must be > 0");
    if (!(smoothness >= 0.0) || !std::isfinite(smoothness))
        throw InvalidArgument("DiffusionSpec: smoothness must be >= 0");
    DiffusionSpec s;
    s.weights.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) s.weights[k] = amplitude * std::pow(static_cast<double>(k + 1), -smoothness);
    s.amplitude = amplitude;
    s.smoothness = smoothness;
    s.power_law = true;
    return s;
}

TimeGrid TimeGrid::make(double horizon, double delta) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidTimeGrid("time horizon must be > 0");
    if (!(delta > 0.0) || delta > horizon) throw InvalidTimeGrid("time step must lie in (0, T]");
    const double ratio = horizon / delta;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * ratio) throw InvalidTimeGrid("time step must divide the horizon");
    return TimeGrid{horizon, delta, static_cast<std::size_t>(steps)};
}

double stream_normal(std::uint64_t seed, std::uint64_t mode, std::uint64_t step) {
    const std::uint64_t s = mix(mix(mix(seed) + kGolden * (mode + 1)) + kGolden * (step + 1));
    const double u1 = unit_open(mix(s + 1));
    const double u2 = unit_open(mix(s + 2));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoisePath sample_path(const DiffusionSpec& spec, const HeatSemigroup& sg, double horizon, double delta,
                      std::uint64_t seed) {
    const std::size_t m = sg.grid().size();
    if (spec.weights.size() != m) throw GridMismatch("sample_path: one weight per mode required");
    NoisePath path{spec, TimeGrid::make(horizon, delta), seed, 1, {}, {}};
    const std::size_t n_steps = path.time.steps;

    std::vector<double> decay(m), kick(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double mu = sg.eigenvalue(k);
        decay[k] = std::exp(-mu * delta);
        kick[k] = spec.weights[k] * std::sqrt(-std::expm1(-2.0 * mu * delta) / (2.0 * mu));
    }

    path.modes.assign(n_steps + 1, Modes(m, 0.0));
    for (std::size_t n = 0; n < n_steps; ++n) {
        const Modes& cur = path.modes[n];
        Modes& next = path.modes[n + 1];
        for (std::size_t k = 0; k < m; ++k) {
            next[k] = decay[k] * cur[k];
            if (kick[k] != 0.0) next[k] += kick[k] * stream_normal(seed, k, n);
        }
    }
    path.fields.reserve(n_steps + 1);
    for (const auto& c : path.modes) path.fields.push_back(sg.from_modes(c));
    return path;
}

NoisePath subsample(const NoisePath& path, std::size_t factor) {
    if (factor == 0 || path.time.steps % factor != 0)
        throw InvalidTimeGrid("subsample: factor must divide the step count");
    NoisePath out{path.spec, TimeGrid{path.time.horizon, path.time.delta * static_cast<double>(factor),
                                      path.time.steps / factor},
                  path.seed, path.stride * factor, {}, {}};
    for (std::size_t n = 0; n <= path.time.steps; n += factor) {
        out.modes.push_back(path.modes[n]);
        out.fields.push_back(path.fields[n]);
    }
    return out;
}

double norm_c_lq(const NoisePath& path, double q) {
    double best = 0.0;
    for (const auto& z : path.fields) best = std::max(best, lq_norm(z, q));
    return best;
}

double norm_ld_lqd(const NoisePath& path, double d, double q) {
    if (!(d >= 0.0)) throw InvalidExponent("norm_ld_lqd: d must be >= 0");
    if (!(q >= 1.0)) throw InvalidExponent("norm_ld_lqd: q must be >= 1");
    if (d == 0.0) return 0.0;
    double sum = 0.0;
    for (std::size_t n = 0; n + 1 < path.fields.size(); ++n)
        sum += path.time.delta * std::pow(lq_norm(path.fields[n], q * d), d);
    return std::pow(sum, 1.0 / d);
}

}  // namespace mildlab
