#pragma once

// Run configuration: a JSON document validated in one pass. Every violated
// constraint is collected before ValidationError is thrown, and unknown keys
// are rejected at every level.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mildlab/noise.hpp"
#include "mildlab/scalar_monotone.hpp"
#include "mildlab/solver.hpp"

namespace mildlab {

/// Initial datum. kind is one of zero, sine, spike, values:
///   sine:   amplitude * sin(mode pi x)
///   spike:  amplitude * x^(-exponent)
///   values: explicit nodal values (length M)
struct InitialSpec {
    std::string kind = "sine";
    double amplitude = 1.0;
    int mode = 1;
    double exponent = 0.25;
    std::vector<double> values;

    GridFunction build(const Grid& grid) const;
    nlohmann::json to_json() const;
};

/// Overrides shared by the solver-driven study sections.
struct StudyOverrides {
    std::optional<std::vector<double>> lambda_schedule;
    std::optional<double> cauchy_tol;
    std::optional<std::size_t> paths;
};

struct CauchySettings {
    double q = 2.0;
    StudyOverrides overrides;
};
struct L1Settings {
    StudyOverrides overrides;
};
struct AprioriSettings {
    std::vector<double> exponents = {1.5, 2.0, 3.0};
    StudyOverrides overrides;
};
struct ContractionSettings {
    InitialSpec other{"sine", -0.5, 2, 0.25, {}};
    StudyOverrides overrides;
};
struct LinearOracleSettings {
    std::vector<double> slopes = {1.0, 5.0};
    std::vector<double> deltas = {1.0 / 512.0, 1.0 / 1024.0, 1.0 / 2048.0};
    std::uint64_t seed = 11;
    std::size_t fine_levels = 3;
    StudyOverrides overrides;
};
struct MildIdentitySettings {
    double inclusion_tol = 1e-4;
    double min_fraction = 0.999;
    StudyOverrides overrides;
};
struct MomentSettings {
    double q = 2.0;
    double p = 2.0;
    StudyOverrides overrides;
};
struct PropagationSettings {
    std::optional<double> q, r, d;
    StudyOverrides overrides;
};
struct ExtensionSettings {
    double q = 2.0;
    StudyOverrides overrides;
};
struct ChainRuleSettings {
    double q = 2.0;
    double delta = 1.0 / 256.0;
    /// Forcing amplitude * cos(frequency t) sin(mode pi x).
    double amplitude = 1.0;
    double frequency = 4.0;
    int mode = 2;
};
struct BernoulliSettings {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
};
struct EiconvSettings {
    std::size_t n_max = 1024;
};
struct InvariantSettings {
    std::size_t samples = 10000;
    std::size_t axiom_samples = 1000;
    std::size_t inequality_samples = 100000;
    std::size_t noise_paths = 2000;
    std::uint64_t seed = 1;
};

struct StudySelection {
    std::optional<CauchySettings> cauchy;
    std::optional<L1Settings> l1;
    std::optional<AprioriSettings> apriori;
    std::optional<ContractionSettings> contraction;
    std::optional<LinearOracleSettings> linear_oracle;
    std::optional<MildIdentitySettings> mild_identity;
    std::optional<MomentSettings> moments;
    std::optional<PropagationSettings> propagation;
    std::optional<ExtensionSettings> contraction_extension;
    std::optional<ChainRuleSettings> chain_rule;
    std::optional<BernoulliSettings> bernoulli;
    std::optional<EiconvSettings> eiconv;
};

struct RunConfig {
    std::size_t M = 127;
    double nu = 1.0;
    double horizon = 1.0;
    double delta = 1.0 / 1024.0;
    MonotoneGraph drift = MonotoneGraph::cubic();
    DiffusionSpec noise;
    double q = 2.0;
    double r = 2.0;
    double p = 2.0;
    /// Growth exponent used by exponent arithmetic; defaults to the drift's.
    double d = 3.0;
    SolverConfig solver;
    std::uint64_t master_seed = 7;
    std::size_t paths = 4;
    InitialSpec initial;
    std::string output = "runs/default";
    StudySelection studies;
    InvariantSettings invariants;
    /// The accepted document with every default filled in; hashed into the
    /// manifest digest.
    nlohmann::json normalized;

    std::vector<std::uint64_t> seeds() const;
};

/// Parses and validates. Throws ParseError for malformed JSON and
/// ValidationError listing every violated constraint.
RunConfig parse_config(const std::string& text);

/// 64-bit FNV-1a of the normalized document, as 16 hex digits.
std::string config_digest(const RunConfig& config);

/// Names accepted by `study <name>`.
const std::vector<std::string>& study_names();

}  // namespace mildlab
