#pragma once

#include <span>
#include <vector>

#include "mildlab/grid_space.hpp"

namespace mildlab {

/// Mode coefficients with respect to the orthonormal sine basis.
using Modes = std::vector<double>;

/// Heat semigroup S(t) = exp(-tA) of the second-difference Dirichlet
/// Laplacian A = -nu D_h^2 on the grid, diagonalized exactly by the discrete
/// sine basis
///   e_k(x_i) = sqrt(2) sin(k pi x_i),   mu_k = (4 nu / h^2) sin^2(k pi h / 2),
/// which is orthonormal for the weighted pairing h * sum.
///
/// exp(-tA) is entrywise nonnegative with column sums <= 1, so it is a
/// positive contraction on every discrete L^q. Immutable after construction.
class HeatSemigroup {
public:
    HeatSemigroup(Grid grid, double viscosity);

    const Grid& grid() const { return grid_; }
    double viscosity() const { return nu_; }
    std::span<const double> eigenvalues() const { return mu_; }
    double eigenvalue(std::size_t k) const { return mu_[k]; }
    /// k-th eigenvector (0-based).
    GridFunction eigenvector(std::size_t k) const;

    Modes to_modes(const GridFunction& phi) const;
    GridFunction from_modes(std::span<const double> modes) const;

    /// S(t) phi.
    GridFunction apply_semigroup(const GridFunction& phi, double t) const;
    /// (I + eps A)^{-1} phi.
    GridFunction apply_resolvent(const GridFunction& phi, double eps) const;
    /// A phi via the three-point stencil (independent of the eigenbasis).
    GridFunction apply_generator(const GridFunction& phi) const;

    /// (S * F)(t_n), n = F.size(), with F frozen at the left endpoint of each
    /// step and each mode integrated exactly.
    GridFunction convolve(std::span<const GridFunction> forcing, double delta) const;
    /// (S * F)(t_n) for n = 0..F.size()-1; entry 0 is zero and entry n uses
    /// F_0..F_{n-1}.
    std::vector<GridFunction> convolve_trajectory(std::span<const GridFunction> forcing, double delta) const;

private:
    void check_grid(const GridFunction& phi) const;

    Grid grid_;
    double nu_;
    std::vector<double> mu_;
    // basis_[k * M + i] = e_k(x_i)
    std::vector<double> basis_;
};

}  // namespace mildlab
