#include "mildlab/solver.hpp"

#include <cmath>
#include <string>

namespace mildlab {

std::vector<double> geometric_schedule(double base, std::size_t levels) {
    std::vector<double> out(levels);
    for (std::size_t j = 0; j < levels; ++j) out[j] = std::ldexp(base, -static_cast<int>(j));
    return out;
}

void SolverConfig::validate() const {
    if (!(q >= 1.0)) throw InvalidArgument("solver: q must be >= 1");
    if (!(r >= 1.0)) throw InvalidArgument("solver: r must be >= 1");
    if (r > q) throw InvalidArgument("solver: r must not exceed q");
    if (lambda_schedule.empty()) throw InvalidArgument("solver: empty lambda schedule");
    for (std::size_t j = 0; j < lambda_schedule.size(); ++j) {
        if (!(lambda_schedule[j] > 0.0)) throw InvalidArgument("solver: lambda values must be > 0");
        if (j > 0 && !(lambda_schedule[j] < lambda_schedule[j - 1]))
            throw InvalidArgument("solver: lambda schedule must be strictly decreasing");
    }
    if (!(cauchy_tol > 0.0)) throw InvalidArgument("solver: cauchy_tol must be > 0");
    if (!(root_tol > 0.0)) throw InvalidArgument("solver: root_tol must be > 0");
}

Trajectory solve_regularized(const MonotoneGraph& f, double lambda, const GridFunction& u0, const NoisePath& path,
                             const HeatSemigroup& sg, double root_tol) {
    if (!(lambda > 0.0)) throw InvalidArgument("solve_regularized: lambda must be > 0");
    if (!(u0.grid() == sg.grid()) || path.fields.empty() || !(path.fields.front().grid() == sg.grid()))
        throw GridMismatch("solve_regularized: initial datum, noise path and semigroup disagree on the grid");

    const std::size_t m = sg.grid().size();
    const std::size_t n_steps = path.steps();
    const double delta = path.delta();
    const double shifted = lambda + delta;
    const bool linear_only = f.is_zero();

    std::vector<double> decay(m);
    for (std::size_t k = 0; k < m; ++k) decay[k] = std::exp(-sg.eigenvalue(k) * delta);

    Trajectory u;
    u.reserve(n_steps + 1);
    u.push_back(u0);
    Modes v_modes = sg.to_modes(u0);
    GridFunction v_next(sg.grid());
    for (std::size_t n = 0; n < n_steps; ++n) {
        for (std::size_t k = 0; k < m; ++k) v_modes[k] *= decay[k];
        GridFunction next = sg.from_modes(v_modes);
        const GridFunction& z = path.fields[n + 1];
        for (std::size_t i = 0; i < m; ++i) {
            const double y = next[i] + z[i];
            // w solves w + delta f_lambda(w) = y, i.e. w = y - delta f_(lambda+delta)(y).
            const double w =
                linear_only ? y : (lambda * y + delta * resolvent(f, shifted, y, root_tol)) / shifted;
            next[i] = w;
            v_next[i] = w - z[i];
        }
        v_modes = sg.to_modes(v_next);
        u.push_back(std::move(next));
    }
    return u;
}

Trajectory subtract_noise(const Trajectory& u, const NoisePath& path) {
    if (u.size() != path.fields.size()) throw GridMismatch("subtract_noise: trajectory and path lengths differ");
    Trajectory v;
    v.reserve(u.size());
    for (std::size_t n = 0; n < u.size(); ++n) v.push_back(u[n] - path.fields[n]);
    return v;
}

Trajectory extract_g(const Trajectory& u, const MonotoneGraph& f, double lambda, double root_tol) {
    const YosidaView view(f, lambda, root_tol);
    Trajectory g;
    g.reserve(u.size());
    for (const auto& un : u) {
        GridFunction gn(un.grid());
        if (!f.is_zero())
            for (std::size_t i = 0; i < un.size(); ++i) gn[i] = yosida(view, un[i]);
        g.push_back(std::move(gn));
    }
    return g;
}

double sup_distance(const Trajectory& a, const Trajectory& b, double q) {
    if (a.size() != b.size()) throw GridMismatch("sup_distance: trajectory lengths differ");
    double best = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) best = std::max(best, lq_norm(a[n] - b[n], q));
    return best;
}

double sup_norm(const Trajectory& a, double q) {
    double best = 0.0;
    for (const auto& x : a) best = std::max(best, lq_norm(x, q));
    return best;
}

MildSolution solve_mild(const MonotoneGraph& f, const GridFunction& u0, const NoisePath& path,
                        const HeatSemigroup& sg, const SolverConfig& config) {
    config.validate();
    MildSolution out;
    Trajectory previous;
    for (double lambda : config.lambda_schedule) {
        Trajectory u = solve_regularized(f, lambda, u0, path, sg, config.root_tol);
        LambdaDiagnostics d{lambda, std::nullopt, sup_distance(u, path.fields, config.q), sup_norm(u, config.q)};
        if (!previous.empty())
            d.gap = sup_distance(u, previous, config.q);
        else if (f.is_zero())
            d.gap = 0.0;
        out.levels.push_back(d);
        out.lambda = lambda;
        previous = std::move(u);
        if (d.gap && *d.gap < config.cauchy_tol) {
            out.converged = true;
            break;
        }
    }
    out.u = std::move(previous);
    out.g = extract_g(out.u, f, out.lambda, config.root_tol);
    out.residual = residual_check(out.u, out.g, u0, path, sg, config.r);
    return out;
}

double residual_check(const Trajectory& u, const Trajectory& g, const GridFunction& u0, const NoisePath& path,
                      const HeatSemigroup& sg, double r) {
    if (u.size() != g.size() || u.size() != path.fields.size())
        throw GridMismatch("residual_check: trajectory lengths differ");
    const Trajectory conv = sg.convolve_trajectory(g, path.delta());
    const Modes c0 = sg.to_modes(u0);
    Modes free(c0.size());
    double worst = 0.0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        const double t = path.time.time(n);
        for (std::size_t k = 0; k < c0.size(); ++k) free[k] = c0[k] * std::exp(-sg.eigenvalue(k) * t);
        GridFunction res = u[n] + conv[n];
        res -= sg.from_modes(free);
        res -= path.fields[n];
        worst = std::max(worst, lq_norm(res, r));
    }
    return worst;
}

double residual_budget(const Trajectory& g, double delta, double r) {
    if (g.empty()) return 0.0;
    double sup = 0.0;
    for (const auto& gn : g) sup = std::max(sup, lq_norm(gn, r));
    const double steps = static_cast<double>(g.size() > 1 ? g.size() - 1 : 1);
    return delta * (4.0 + 2.0 * std::log(steps)) * sup;
}

double inclusion_check(const Trajectory& u, const Trajectory& g, const MonotoneGraph& f, double tol) {
    if (!(tol > 0.0)) throw InvalidArgument("inclusion_check: tol must be > 0");
    if (u.size() != g.size()) throw GridMismatch("inclusion_check: trajectory lengths differ");
    std::size_t hits = 0;
    std::size_t total = 0;
    for (std::size_t n = 0; n < u.size(); ++n) {
        require_same_grid(u[n], g[n]);
        for (std::size_t i = 0; i < u[n].size(); ++i) {
            ++total;
            if (graph_distance(f, u[n][i], g[n][i]) <= tol) ++hits;
        }
    }
    return total == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(total);
}

double qstar(double q, double r, double d) {
    if (!(q > 1.0)) throw InvalidExponent("qstar: q must be > 1");
    if (!(r >= 1.0) || r > q) throw InvalidExponent("qstar: need 1 <= r <= q");
    if (!(d >= 0.0)) throw InvalidExponent("qstar: d must be >= 0");
    if (q >= 2.0) return std::max(r * d, 2.0 * d + q - 2.0);
    return q * d;
}

}  // namespace mildlab
