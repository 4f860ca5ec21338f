#pragma once

// Experiment runners confronting the quantitative estimates with measured
// solver output, and numerical checks of the auxiliary inequalities.
//
// Every study returns a StudyReport. A report passes only when every listed
// threshold is met; raw series are kept so that the verdict can be audited.

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mildlab/noise.hpp"
#include "mildlab/scalar_monotone.hpp"
#include "mildlab/semigroup.hpp"
#include "mildlab/solver.hpp"

namespace mildlab {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

struct Threshold {
    std::string name;
    double measured;
    double limit;
    /// "<=" or ">="
    std::string relation;
    bool passed;
};

struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct StudyReport {
    std::string name;
    std::string claim;
    nlohmann::json inputs = nlohmann::json::object();
    // deque: references returned by add_series stay valid.
    std::deque<Series> series;
    std::map<std::string, double> fitted;
    std::vector<Threshold> thresholds;
    Verdict verdict = Verdict::inconclusive;
    /// Set when a precondition of the claim could not be met (e.g. the
    /// schedule was exhausted); the verdict is then inconclusive unless a
    /// threshold already failed.
    std::vector<std::string> notes;
    bool inconclusive = false;

    Series& add_series(std::string series_name, std::vector<std::string> columns);
    void require_at_most(std::string what, double measured, double limit);
    void require_at_least(std::string what, double measured, double limit);
    void require(std::string what, bool ok);
    /// Computes the verdict from the thresholds.
    StudyReport& finalize();
    bool passed() const { return verdict == Verdict::pass; }
};

nlohmann::json to_json(const StudyReport& report);
/// Long-format CSV: series,column,row,value is awkward to read, so each
/// series is written as its own block headed by "# <name>".
std::string series_csv(const StudyReport& report);

/// Shared inputs of the solver-driven studies.
struct StudyContext {
    HeatSemigroup sg;
    DiffusionSpec noise;
    double horizon = 1.0;
    double delta = 1.0 / 1024.0;
    std::vector<std::uint64_t> seeds;
    SolverConfig solver;
    GridFunction u0;
    double p = 2.0;
    std::size_t workers = 1;

    NoisePath path(std::uint64_t seed) const { return sample_path(noise, sg, horizon, delta, seed); }
};

/// Seeds master, master+1, ..., master+count-1.
std::vector<std::uint64_t> seed_range(std::uint64_t master, std::size_t count);

/// Slope of the least-squares line through (log x, log y).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Solver-driven studies.

/// Cauchy gaps sup_t ||u_lambda - u_next||_q along the schedule; passes when
/// each seed's gaps strictly decrease and its log-log slope is at least
/// rate(q) - 0.15, rate(q) = 1/q for q >= 2 and (q-1)/q for q in (1, 2).
StudyReport cauchy_rate_study(const MonotoneGraph& f, double q, const StudyContext& ctx);

/// L^1 convergence machinery for a bounded drift: sup-L^1 gaps, the
/// Gamma_(lambda+mu) functional of the differences, the equiintegrability
/// proxy at two scales, and the boundedness of f_lambda(u_lambda) u_lambda.
StudyReport l1_convergence_study(const MonotoneGraph& f, const StudyContext& ctx);

/// The two explicit-constant a-priori estimates on v_lambda = u_lambda - z:
///   ||v(t_n)||_q   <= ||u0||_q   + 4 sum_{j=1..n} delta ||f~max(z(t_j))||_q
///   ||v(t_n)||_q^2 <= ||u0||_q^2 + 2 sum_{j=1..n} delta ||phi(z(t_j))||_{q/2}
/// at every step and every lambda. The second is checked for q >= 2 only.
StudyReport apriori_bound_study(const MonotoneGraph& f, const std::vector<double>& qs, const StudyContext& ctx);

/// Paired runs from u0 and u0_other sharing each noise path:
/// sup_t ||u1 - u2||_r <= (1 + 1e-10) ||u0 - u0_other||_r for every lambda
/// and for the continuation limits.
StudyReport contraction_study(const MonotoneGraph& f, const GridFunction& u0_other, const StudyContext& ctx);

/// Linear drift f(x) = c x against an independent per-mode exponential
/// integrator with noise from the first mode only. The noise is sampled once
/// at delta_min / 2^fine_levels and subsampled, so all resolutions see the
/// same Brownian path.
StudyReport linear_oracle_study(double c, const std::vector<double>& deltas, std::uint64_t seed,
                                const StudyContext& ctx, std::size_t fine_levels = 3);

/// Continuation limit: residual of the mild identity against its
/// first-order budget and the fraction of space-time points on the graph.
StudyReport mild_identity_study(const MonotoneGraph& f, double inclusion_tol, double min_fraction,
                                const StudyContext& ctx);

/// Monte Carlo E sup_t ||u_lambda||_q^p for every lambda of the schedule.
StudyReport moment_study(const MonotoneGraph& f, double q, double p, const StudyContext& ctx);

/// sup_t ||u||_(q*) <= C (1 + xi + ||u0||_(q*)) with C fitted on the first
/// half of the seeds and frozen for the second half.
StudyReport propagation_study(const MonotoneGraph& f, double q, double r, double d, const StudyContext& ctx);

/// Solutions from truncations of an L^q datum outside L^(q*) form a Cauchy
/// sequence dominated by the initial-data gaps.
StudyReport contraction_extension_study(const MonotoneGraph& f, double q, const StudyContext& ctx);

// ---------------------------------------------------------------------------
// Auxiliary lemmas.

/// v = S v0 + S*F with F(t, x) smooth; checks the duality-map chain-rule
/// inequality, its first-order quadrature slack under delta-refinement and
/// the one-sided derivative inequalities of ||v||^q.
StudyReport chain_rule_study(double q, const HeatSemigroup& sg, const std::function<double(double, double)>& forcing,
                             const GridFunction& v0, double horizon, double delta);

/// Discrete extremal solutions of y^2 = y0^2 + int g y against
/// |y| <= y0 + 2 int g.
StudyReport bernoulli_study(std::size_t samples, std::uint64_t seed);

/// <f_n, g_n> -> 0 for equiintegrable f_n and shrinking g_n; the spike
/// control n 1_[0,1/n] stays at one.
StudyReport eiconv_demo(std::size_t n_max);

// ---------------------------------------------------------------------------
// Invariant checks.

/// Resolvent identity, Yosida bracket lower bound, Yosida semigroup law,
/// domination, contraction, Lipschitz and monotonicity at random samples.
StudyReport scalar_identity_check(const MonotoneGraph& f, std::size_t samples, std::uint64_t seed,
                                  double root_tol = 1e-12);
/// Sign and linear resolvents and Yosida maps against their closed forms.
StudyReport closed_form_check(std::size_t samples, std::uint64_t seed, double root_tol = 1e-12);
/// Power-mean chains for a in [0,1] and [1,8], and the j_q Hoelder bound
/// with constant 2^(2-q).
StudyReport inequality_check(std::size_t samples, std::uint64_t seed);
/// S(0) = I, composition, L^q contraction, positivity, accretivity of A
/// against J_q and the sign condition <A phi, gamma_eps(phi)> >= 0.
StudyReport semigroup_axiom_check(const HeatSemigroup& sg, std::size_t samples, std::uint64_t seed);
/// Bracket accretivity of superposition drifts, duality-map identities and
/// the Gamma properties.
StudyReport grid_identity_check(const std::vector<MonotoneGraph>& drifts, const Grid& grid, std::size_t samples,
                                std::uint64_t seed);
/// Per-mode variances and cross-mode correlations over many paths.
StudyReport noise_exactness_check(const HeatSemigroup& sg, std::size_t n_paths, std::uint64_t master_seed,
                                  std::size_t workers);

/// The six test drifts: x, x^3, x|x|, x^3|x|, sgn, sgn + x.
std::vector<MonotoneGraph> test_drifts();

}  // namespace mildlab
