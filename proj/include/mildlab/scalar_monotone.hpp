#pragma once

// Scalar machinery for increasing functions on the real line: the
// fill-the-jumps maximal monotone extension, resolvents, Yosida
// approximations, the convex primitive and its Moreau envelope.

#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mildlab/errors.hpp"

namespace mildlab {

/// x |x|^(p-1): odd, increasing for p > 0.
inline double signed_pow(double x, double p) {
    if (p == 1.0) return x;
    if (p == 2.0) return x * std::abs(x);
    if (p == 3.0) return x * x * x;
    if (p == 4.0) return x * x * x * std::abs(x);
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), p), x);
}

/// Closed-form branch evaluator  constant + linear*x + power_coeff * x|x|^(power-1).
/// Nondecreasing on all of R whenever linear >= 0, power_coeff >= 0, power > 0.
struct Branch {
    double constant = 0.0;
    double linear = 0.0;
    double power_coeff = 0.0;
    double power = 1.0;

    double operator()(double x) const {
        double v = constant + linear * x;
        if (power_coeff != 0.0) v += power_coeff * signed_pow(x, power);
        return v;
    }

    /// Exact antiderivative vanishing at 0.
    double antiderivative(double x) const {
        double v = constant * x + 0.5 * linear * x * x;
        if (power_coeff != 0.0) v += power_coeff * std::pow(std::abs(x), power + 1.0) / (power + 1.0);
        return v;
    }
};

/// Element of the filled graph at x.
enum class Section {
    min,      ///< f(x-)
    max,      ///< f(x+)
    mid,      ///< midpoint of [f(x-), f(x+)]
    min_abs,  ///< element of least absolute value
    max_abs,  ///< element of largest absolute value
};

/// Increasing scalar function given by ordered branches, together with its
/// growth data |f(x)| <= C_f (1 + |x|^d).
///
/// Branch i is used on [breakpoint[i-1], breakpoint[i]) (unbounded at the
/// ends), so the single-valued evaluation is right-continuous. A breakpoint is
/// a jump point when the left branch ends strictly below where the right one
/// starts. Immutable; copies share storage.
class MonotoneGraph {
public:
    /// Validates monotonicity, the growth bound on 1e5 sample points and
    /// the ordering of breakpoints; throws InvalidGraph otherwise.
    static MonotoneGraph piecewise(std::vector<double> breakpoints, std::vector<Branch> branches,
                                   double growth_exponent, double growth_constant,
                                   std::string name = "piecewise");

    static MonotoneGraph zero();
    static MonotoneGraph linear(double slope);
    static MonotoneGraph cubic();
    /// x |x|^(d-1), d > 0.
    static MonotoneGraph odd_power(double d);
    static MonotoneGraph sign();
    /// sgn(x) + x.
    static MonotoneGraph sign_plus_linear();

    /// Single-valued (right-continuous) evaluation.
    double operator()(double x) const;
    double left_limit(double x) const;
    double right_limit(double x) const;

    std::span<const double> breakpoints() const { return impl_->breakpoints; }
    std::span<const Branch> branches() const { return impl_->branches; }
    std::span<const double> jump_points() const { return impl_->jumps; }
    double growth_exponent() const { return impl_->growth_exponent; }
    double growth_constant() const { return impl_->growth_constant; }
    bool zero_in_graph() const { return impl_->zero_in_graph; }
    /// True when every branch is the zero function.
    bool is_zero() const { return impl_->is_zero; }
    const std::string& name() const { return impl_->name; }

    std::size_t branch_index(double x) const;

private:
    struct Impl {
        std::vector<double> breakpoints;
        std::vector<Branch> branches;
        std::vector<double> jumps;
        double growth_exponent = 0.0;
        double growth_constant = 1.0;
        bool zero_in_graph = false;
        bool is_zero = false;
        std::string name;
    };
    explicit MonotoneGraph(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

    std::shared_ptr<const Impl> impl_;
};

/// Graph parameterized by a Yosida index lambda.
struct YosidaView {
    MonotoneGraph graph;
    double lambda;
    double root_tol;

    YosidaView(MonotoneGraph g, double lambda, double root_tol = 1e-12);
};

inline constexpr int kMaxBracketDoublings = 200;

/// Locates the unique y with map(y-) <= target <= map(y+) for a strictly
/// increasing (possibly discontinuous) map, by bracket doubling from
/// [target - |target| - 1, target + |target| + 1] followed by bisection until
/// the bracket is no wider than `tol` or cannot be split further.
template <class Map>
double solve_increasing(const Map& map, double target, double tol) {
    if (!std::isfinite(target)) throw NonFiniteInput("scalar solve: target is not finite");
    double wlo = std::abs(target) + 1.0;
    double whi = wlo;
    double lo = target - wlo;
    double hi = target + whi;
    int doublings = 0;
    while (!(map(lo) < target)) {
        if (++doublings > kMaxBracketDoublings) throw BracketFailure("scalar solve: lower bracket expansion failed");
        wlo *= 2.0;
        lo = target - wlo;
    }
    doublings = 0;
    while (!(map(hi) >= target)) {
        if (++doublings > kMaxBracketDoublings) throw BracketFailure("scalar solve: upper bracket expansion failed");
        whi *= 2.0;
        hi = target + whi;
    }
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (map(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return lo + 0.5 * (hi - lo);
}

/// (I + lambda F)^{-1} x for an arbitrary nondecreasing callable F.
template <class F>
double resolvent_of(const F& f, double lambda, double x, double tol) {
    return solve_increasing([&](double y) { return y + lambda * f(y); }, x, tol);
}

/// Yosida approximation (x - (I + lambda F)^{-1} x) / lambda of a callable.
template <class F>
double yosida_of(const F& f, double lambda, double x, double tol) {
    return (x - resolvent_of(f, lambda, x, tol)) / lambda;
}

double section(const MonotoneGraph& graph, double x, Section choice);

/// R_lambda x: the unique y with x in y + lambda f~(y).
double resolvent(const MonotoneGraph& graph, double lambda, double x, double tol = 1e-12);

/// f_lambda(x) = (x - R_lambda x) / lambda.
double yosida(const YosidaView& view, double x);

/// phi(x) = integral of f from 0 to x, by adaptive Simpson on each
/// continuity interval.
double primitive(const MonotoneGraph& graph, double x, double quad_tol = 1e-12);

/// phi_lambda(x) = phi(R_lambda x) + lambda/2 f_lambda(x)^2.
double moreau(const YosidaView& view, double x, double quad_tol = 1e-12);

/// Distance from (u, g) to the filled graph, vertical offset only.
double vertical_distance(const MonotoneGraph& graph, double u, double g);

/// Distance from (u, g) to the filled graph in the max-metric of R^2.
double graph_distance(const MonotoneGraph& graph, double u, double g);

}  // namespace mildlab
