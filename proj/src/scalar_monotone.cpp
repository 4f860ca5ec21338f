#include "mildlab/scalar_monotone.hpp"

#include <sstream>

#include <algorithm>
#include <limits>

namespace mildlab {

namespace {

constexpr int kGrowthSamples = 100000;

bool branch_is_zero(const Branch& b) {
    return b.constant == 0.0 && b.linear == 0.0 && b.power_coeff == 0.0;
}

// Deterministic sample set: log-spaced magnitudes over [1e-6, 1e6] of both
// signs plus a uniform sweep of [-10, 10].
std::vector<double> growth_samples() {
    std::vector<double> xs;
    xs.reserve(kGrowthSamples);
    const int log_count = kGrowthSamples / 2;
    for (int k = 0; k < log_count / 2; ++k) {
        const double e = -6.0 + 12.0 * k / (log_count / 2 - 1);
        const double x = std::pow(10.0, e);
        xs.push_back(x);
        xs.push_back(-x);
    }
    const int lin_count = kGrowthSamples - static_cast<int>(xs.size());
    for (int k = 0; k < lin_count; ++k) xs.push_back(-10.0 + 20.0 * k / (lin_count - 1));
    return xs;
}

double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 48);
}

std::string format_exponent(double d) {
    std::ostringstream os;
    os << d;
    return os.str();
}

}  // namespace

MonotoneGraph MonotoneGraph::piecewise(std::vector<double> breakpoints, std::vector<Branch> branches,
                                       double growth_exponent, double growth_constant, std::string name) {
    if (branches.size() != breakpoints.size() + 1)
        throw InvalidGraph("graph '" + name + "': need exactly one more branch than breakpoints");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!std::isfinite(breakpoints[i])) throw InvalidGraph("graph '" + name + "': non-finite breakpoint");
        if (i > 0 && !(breakpoints[i - 1] < breakpoints[i]))
            throw InvalidGraph("graph '" + name + "': breakpoints must be strictly increasing");
    }
    for (const auto& b : branches) {
        if (!std::isfinite(b.constant) || !std::isfinite(b.linear) || !std::isfinite(b.power_coeff) ||
            !std::isfinite(b.power))
            throw InvalidGraph("graph '" + name + "': non-finite branch coefficient");
        if (b.linear < 0.0 || b.power_coeff < 0.0 || !(b.power > 0.0))
            throw InvalidGraph("graph '" + name + "': branch is not nondecreasing");
    }
    if (!(growth_exponent >= 0.0) || !std::isfinite(growth_exponent))
        throw InvalidGraph("graph '" + name + "': growth exponent must be >= 0");
    if (!(growth_constant > 0.0) || !std::isfinite(growth_constant))
        throw InvalidGraph("graph '" + name + "': growth constant must be > 0");

    auto impl = std::make_shared<Impl>();
    impl->breakpoints = std::move(breakpoints);
    impl->branches = std::move(branches);
    impl->growth_exponent = growth_exponent;
    impl->growth_constant = growth_constant;
    impl->name = std::move(name);
    impl->is_zero = std::all_of(impl->branches.begin(), impl->branches.end(), branch_is_zero);

    for (std::size_t i = 0; i < impl->breakpoints.size(); ++i) {
        const double x = impl->breakpoints[i];
        const double left = impl->branches[i](x);
        const double right = impl->branches[i + 1](x);
        if (left > right) throw InvalidGraph("graph '" + impl->name + "': decreasing step at a breakpoint");
        if (left < right) impl->jumps.push_back(x);
    }

    MonotoneGraph g(impl);

    auto xs = growth_samples();
    for (double x : impl->breakpoints) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    double prev = -std::numeric_limits<double>::infinity();
    for (double x : xs) {
        const double lo = g.left_limit(x);
        const double hi = g.right_limit(x);
        if (lo < prev) throw InvalidGraph("graph '" + impl->name + "': not monotone at sampled points");
        prev = hi;
        const double bound = growth_constant * (1.0 + std::pow(std::abs(x), growth_exponent));
        const double mag = std::max(std::abs(lo), std::abs(hi));
        if (mag > bound * (1.0 + 1e-12))
            throw InvalidGraph("graph '" + impl->name + "': growth bound violated at x = " + std::to_string(x));
    }

    impl->zero_in_graph = g.left_limit(0.0) <= 0.0 && 0.0 <= g.right_limit(0.0);
    return g;
}

MonotoneGraph MonotoneGraph::zero() { return piecewise({}, {Branch{}}, 0.0, 1.0, "zero"); }

MonotoneGraph MonotoneGraph::linear(double slope) {
    if (!(slope >= 0.0)) throw InvalidGraph("linear graph needs a nonnegative slope");
    return piecewise({}, {Branch{0.0, slope, 0.0, 1.0}}, 1.0, std::max(slope, 1e-300), "linear");
}

MonotoneGraph MonotoneGraph::cubic() { return piecewise({}, {Branch{0.0, 0.0, 1.0, 3.0}}, 3.0, 1.0, "cubic"); }

MonotoneGraph MonotoneGraph::odd_power(double d) {
    if (!(d > 0.0)) throw InvalidGraph("odd_power graph needs d > 0");
    return piecewise({}, {Branch{0.0, 0.0, 1.0, d}}, d, 1.0, "odd_power_" + format_exponent(d));
}

MonotoneGraph MonotoneGraph::sign() {
    return piecewise({0.0}, {Branch{-1.0}, Branch{1.0}}, 0.0, 1.0, "sign");
}

MonotoneGraph MonotoneGraph::sign_plus_linear() {
    return piecewise({0.0}, {Branch{-1.0, 1.0}, Branch{1.0, 1.0}}, 1.0, 1.0, "sign_plus_linear");
}

std::size_t MonotoneGraph::branch_index(double x) const {
    const auto& bp = impl_->breakpoints;
    return static_cast<std::size_t>(std::upper_bound(bp.begin(), bp.end(), x) - bp.begin());
}

double MonotoneGraph::operator()(double x) const {
    const auto& br = impl_->branches;
    if (br.size() == 1) return br.front()(x);
    return br[branch_index(x)](x);
}

double MonotoneGraph::left_limit(double x) const {
    const auto& bp = impl_->breakpoints;
    const auto it = std::lower_bound(bp.begin(), bp.end(), x);
    return impl_->branches[static_cast<std::size_t>(it - bp.begin())](x);
}

double MonotoneGraph::right_limit(double x) const { return (*this)(x); }

YosidaView::YosidaView(MonotoneGraph g, double lambda_, double root_tol_)
    : graph(std::move(g)), lambda(lambda_), root_tol(root_tol_) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("YosidaView: lambda must be > 0");
    if (!(root_tol > 0.0)) throw InvalidArgument("YosidaView: root_tol must be > 0");
}

double section(const MonotoneGraph& graph, double x, Section choice) {
    const double lo = graph.left_limit(x);
    const double hi = graph.right_limit(x);
    switch (choice) {
        case Section::min: return lo;
        case Section::max: return hi;
        case Section::mid: return lo == hi ? lo : 0.5 * (lo + hi);
        case Section::min_abs:
            if (lo <= 0.0 && 0.0 <= hi) return 0.0;
            return hi < 0.0 ? hi : lo;
        case Section::max_abs: return std::abs(lo) > std::abs(hi) ? lo : hi;
    }
    return hi;
}

double resolvent(const MonotoneGraph& graph, double lambda, double x, double tol) {
    if (!(lambda > 0.0)) throw InvalidArgument("resolvent: lambda must be > 0");
    if (!std::isfinite(x)) throw NonFiniteInput("resolvent: x is not finite");
    // Exact answers at 0 and at the breakpoints, where bisection would only
    // return a midpoint within tol.
    auto exact = [&](double y) { return y + lambda * graph.left_limit(y) <= x && x <= y + lambda * graph.right_limit(y); };
    if (exact(0.0)) return 0.0;
    for (double bp : graph.breakpoints())
        if (exact(bp)) return bp;
    return resolvent_of(graph, lambda, x, tol);
}

double yosida(const YosidaView& view, double x) {
    return (x - resolvent(view.graph, view.lambda, x, view.root_tol)) / view.lambda;
}

double primitive(const MonotoneGraph& graph, double x, double quad_tol) {
    if (x == 0.0) return 0.0;
    const double a = std::min(0.0, x);
    const double b = std::max(0.0, x);
    // Cut points: breakpoints inside (a, b) and 0, where signed_pow may lose
    // smoothness.
    std::vector<double> cuts{a};
    for (double bp : graph.breakpoints())
        if (bp > a && bp < b) cuts.push_back(bp);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const double piece_tol = quad_tol / static_cast<double>(cuts.size());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        const Branch& br = graph.branches()[graph.branch_index(0.5 * (lo + hi))];
        total += integrate(br, lo, hi, piece_tol);
    }
    return x > 0.0 ? total : -total;
}

double moreau(const YosidaView& view, double x, double quad_tol) {
    const double r = resolvent(view.graph, view.lambda, x, view.root_tol);
    const double fl = (x - r) / view.lambda;
    return primitive(view.graph, r, quad_tol) + 0.5 * view.lambda * fl * fl;
}

double vertical_distance(const MonotoneGraph& graph, double u, double g) {
    const double lo = graph.left_limit(u);
    const double hi = graph.right_limit(u);
    if (g < lo) return lo - g;
    if (g > hi) return g - hi;
    return 0.0;
}

double graph_distance(const MonotoneGraph& graph, double u, double g) {
    double hi = vertical_distance(graph, u, g);
    if (hi == 0.0) return 0.0;
    // feasible(s): some graph point lies in the box of half-width s around
    // (u, g). The filled range over [u-s, u+s] is [f((u-s)-), f((u+s)+)].
    auto feasible = [&](double s) {
        return graph.left_limit(u - s) - s <= g && g <= graph.right_limit(u + s) + s;
    };
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace mildlab
