#include "mildlab/semigroup.hpp"

#include <cmath>
#include <numbers>

namespace mildlab {

HeatSemigroup::HeatSemigroup(Grid grid, double viscosity) : grid_(grid), nu_(viscosity) {
    if (grid.size() < 2) throw InvalidArgument("HeatSemigroup: need M >= 2");
    if (!(viscosity > 0.0) || !std::isfinite(viscosity)) throw InvalidArgument("HeatSemigroup: viscosity must be > 0");
    const std::size_t m = grid.size();
    const double h = grid.spacing();
    const auto n1 = static_cast<long long>(m + 1);
    mu_.resize(m);
    basis_.resize(m * m);
    for (std::size_t k = 0; k < m; ++k) {
        const double s = std::sin(std::numbers::pi * static_cast<double>(k + 1) * h / 2.0);
        mu_[k] = 4.0 * nu_ / (h * h) * s * s;
        for (std::size_t i = 0; i < m; ++i) {
            // Reduce k(i) mod 2(M+1) so the sine argument stays in [0, 2 pi).
            const long long idx = (static_cast<long long>(k + 1) * static_cast<long long>(i + 1)) % (2 * n1);
            basis_[k * m + i] = std::numbers::sqrt2 * std::sin(std::numbers::pi * static_cast<double>(idx) /
                                                               static_cast<double>(n1));
        }
    }
}

void HeatSemigroup::check_grid(const GridFunction& phi) const {
    if (!(phi.grid() == grid_)) throw GridMismatch("HeatSemigroup: grid function lives on another grid");
}

GridFunction HeatSemigroup::eigenvector(std::size_t k) const {
    const std::size_t m = grid_.size();
    return GridFunction(grid_, std::vector<double>(basis_.begin() + static_cast<std::ptrdiff_t>(k * m),
                                                   basis_.begin() + static_cast<std::ptrdiff_t>((k + 1) * m)));
}

Modes HeatSemigroup::to_modes(const GridFunction& phi) const {
    check_grid(phi);
    const std::size_t m = grid_.size();
    const double h = grid_.spacing();
    const auto v = phi.values();
    Modes out(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double* row = &basis_[k * m];
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += row[i] * v[i];
        out[k] = h * s;
    }
    return out;
}

GridFunction HeatSemigroup::from_modes(std::span<const double> modes) const {
    const std::size_t m = grid_.size();
    if (modes.size() != m) throw GridMismatch("from_modes: mode count does not match grid");
    std::vector<double> out(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double c = modes[k];
        if (c == 0.0) continue;
        const double* row = &basis_[k * m];
        for (std::size_t i = 0; i < m; ++i) out[i] += c * row[i];
    }
    return GridFunction(grid_, std::move(out));
}

GridFunction HeatSemigroup::apply_semigroup(const GridFunction& phi, double t) const {
    if (!(t >= 0.0)) throw NegativeTime("apply_semigroup: t must be >= 0");
    if (t == 0.0) {
        check_grid(phi);
        return phi;
    }
    Modes c = to_modes(phi);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] *= std::exp(-mu_[k] * t);
    return from_modes(c);
}

GridFunction HeatSemigroup::apply_resolvent(const GridFunction& phi, double eps) const {
    if (!(eps > 0.0)) throw InvalidArgument("apply_resolvent: eps must be > 0");
    Modes c = to_modes(phi);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] /= 1.0 + eps * mu_[k];
    return from_modes(c);
}

GridFunction HeatSemigroup::apply_generator(const GridFunction& phi) const {
    check_grid(phi);
    const std::size_t m = grid_.size();
    const double h = grid_.spacing();
    const double scale = nu_ / (h * h);
    GridFunction out(grid_);
    for (std::size_t i = 0; i < m; ++i) {
        const double left = i > 0 ? phi[i - 1] : 0.0;
        const double right = i + 1 < m ? phi[i + 1] : 0.0;
        out[i] = scale * (2.0 * phi[i] - left - right);
    }
    return out;
}

GridFunction HeatSemigroup::convolve(std::span<const GridFunction> forcing, double delta) const {
    if (forcing.empty()) throw EmptyInput("convolve: empty forcing sequence");
    if (!(delta > 0.0)) throw InvalidTimeGrid("convolve: delta must be > 0");
    const std::size_t m = grid_.size();
    Modes acc(m, 0.0);
    for (const auto& f : forcing) {
        const Modes fh = to_modes(f);
        for (std::size_t k = 0; k < m; ++k) {
            const double decay = std::exp(-mu_[k] * delta);
            acc[k] = decay * acc[k] + (-std::expm1(-mu_[k] * delta) / mu_[k]) * fh[k];
        }
    }
    return from_modes(acc);
}

std::vector<GridFunction> HeatSemigroup::convolve_trajectory(std::span<const GridFunction> forcing,
                                                             double delta) const {
    if (forcing.empty()) throw EmptyInput("convolve_trajectory: empty forcing sequence");
    if (!(delta > 0.0)) throw InvalidTimeGrid("convolve_trajectory: delta must be > 0");
    const std::size_t m = grid_.size();
    std::vector<double> decay(m), weight(m);
    for (std::size_t k = 0; k < m; ++k) {
        decay[k] = std::exp(-mu_[k] * delta);
        weight[k] = -std::expm1(-mu_[k] * delta) / mu_[k];
    }
    std::vector<GridFunction> out;
    out.reserve(forcing.size());
    out.emplace_back(grid_);
    Modes acc(m, 0.0);
    for (std::size_t n = 0; n + 1 < forcing.size(); ++n) {
        const Modes fh = to_modes(forcing[n]);
        for (std::size_t k = 0; k < m; ++k) acc[k] = decay[k] * acc[k] + weight[k] * fh[k];
        out.push_back(from_modes(acc));
    }
    return out;
}

}  // namespace mildlab
