#pragma once

// Pathwise mild solver. For a fixed realization z of the stochastic
// convolution, v = u_lambda - z solves the deterministic equation
//   v' + A v + f_lambda(v + z) = 0,  v(0) = u0,
// which is stepped by Lie splitting: an exact heat step followed by an
// implicit step of the Yosida drift, the latter in closed form through
//   (f_lambda)_delta = f_(lambda + delta).
// The lambda-continuation then drives lambda to zero.

#include <optional>
#include <vector>

#include "mildlab/noise.hpp"
#include "mildlab/scalar_monotone.hpp"
#include "mildlab/semigroup.hpp"

namespace mildlab {

using Trajectory = std::vector<GridFunction>;

/// lambda_j = base * 2^-j, j = 0..levels-1.
std::vector<double> geometric_schedule(double base, std::size_t levels);

struct SolverConfig {
    double q = 2.0;
    double r = 2.0;
    std::vector<double> lambda_schedule = geometric_schedule(0.25, 7);
    double cauchy_tol = 1e-3;
    double root_tol = 1e-14;

    /// Throws InvalidArgument listing the first violated constraint.
    void validate() const;
};

struct LambdaDiagnostics {
    double lambda;
    /// sup_t ||u_lambda - u_previous||_q; empty for the first level.
    std::optional<double> gap;
    /// sup_t ||v_lambda(t)||_q
    double sup_v_norm;
    /// sup_t ||u_lambda(t)||_q
    double sup_u_norm;
};

struct MildSolution {
    Trajectory u;
    Trajectory g;
    double lambda = 0.0;
    bool converged = false;
    double residual = 0.0;
    std::vector<LambdaDiagnostics> levels;
};

/// Solves the regularized equation on the time grid of `path`.
/// For f == 0 the result is S(t_n) u0 + z(t_n).
Trajectory solve_regularized(const MonotoneGraph& f, double lambda, const GridFunction& u0, const NoisePath& path,
                             const HeatSemigroup& sg, double root_tol = 1e-14);

/// v_lambda = u_lambda - z.
Trajectory subtract_noise(const Trajectory& u, const NoisePath& path);

/// g_lambda(t_n) = f_lambda(u_lambda(t_n)) pointwise.
Trajectory extract_g(const Trajectory& u, const MonotoneGraph& f, double lambda, double root_tol = 1e-14);

/// Runs the schedule, stopping once consecutive sup-gaps drop below
/// cauchy_tol. An exhausted schedule is reported through `converged`.
MildSolution solve_mild(const MonotoneGraph& f, const GridFunction& u0, const NoisePath& path,
                        const HeatSemigroup& sg, const SolverConfig& config);

/// sup_n || u(t_n) + (S*g)(t_n) - S(t_n) u0 - z(t_n) ||_r.
double residual_check(const Trajectory& u, const Trajectory& g, const GridFunction& u0, const NoisePath& path,
                      const HeatSemigroup& sg, double r);

/// delta (4 + 2 ln N) sup_n ||g(t_n)||_r: first-order size of the gap between
/// the scheme's right-endpoint and the convolution's left-endpoint time
/// quadratures (summation by parts plus the smoothing of S).
double residual_budget(const Trajectory& g, double delta, double r);

/// Fraction of space-time nodes whose (u, g) lies within `tol` of the filled
/// graph (max-metric distance).
double inclusion_check(const Trajectory& u, const Trajectory& g, const MonotoneGraph& f, double tol);

/// rd v (2d + q - 2) for q >= 2, qd for q in (1, 2).
double qstar(double q, double r, double d);

/// sup_n ||a(t_n) - b(t_n)||_q.
double sup_distance(const Trajectory& a, const Trajectory& b, double q);
/// sup_n ||a(t_n)||_q.
double sup_norm(const Trajectory& a, double q);

}  // namespace mildlab
