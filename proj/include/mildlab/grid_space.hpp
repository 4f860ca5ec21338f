#pragma once

// Discrete L^q(0,1): values on the uniform interior grid x_i = i h,
// i = 1..M, h = 1/(M+1), with zero Dirichlet values at both ends. Every
// integral over the domain is the rectangle rule h * sum.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <vector>

#include "mildlab/errors.hpp"

namespace mildlab {

class Grid {
public:
    /// M >= 1 interior nodes. M = 1 is only meaningful for norm bookkeeping;
    /// the semigroup requires M >= 2.
    explicit Grid(std::size_t interior_points);

    std::size_t size() const { return m_; }
    double spacing() const { return h_; }
    double node(std::size_t i) const { return static_cast<double>(i + 1) * h_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t m_;
    double h_;
};

class GridFunction {
public:
    explicit GridFunction(Grid grid);  // zeros
    GridFunction(Grid grid, std::vector<double> values);
    GridFunction(Grid grid, std::initializer_list<double> values)
        : GridFunction(grid, std::vector<double>(values)) {}

    template <class F>
    static GridFunction from_function(Grid grid, const F& f) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s);

    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

private:
    Grid grid_;
    std::vector<double> values_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b);

/// (h sum |phi_i|^q)^(1/q); throws InvalidExponent for q < 1.
double lq_norm(const GridFunction& phi, double q);
double max_norm(const GridFunction& phi);
/// h sum phi_i psi_i.
double pairing(const GridFunction& phi, const GridFunction& psi);

/// |x|^(q-1) sgn(x), with j_1(0) = 0.
double jq_scalar(double x, double q);
/// Pointwise j_q; pairs with phi to ||phi||_q^q and has L^{q'} norm ||phi||_q^(q-1).
GridFunction duality_map(const GridFunction& phi, double q);

/// Maximal pairing of y against the L^1 duality selections of x.
double bracket_l1(const GridFunction& x, const GridFunction& y);

/// Piecewise-linear sign approximation of slope 2/sqrt(eps) on
/// [-sqrt(eps)/2, sqrt(eps)/2], saturated at +-1 outside.
double gamma_eps(double x, double eps);
/// sqrt(eps)/4 + integral_0^x gamma_eps: a C^1 convex majorant of |x|.
double big_gamma0(double x, double eps);
/// h sum big_gamma0(phi_i).
double big_gamma(const GridFunction& phi, double eps);
GridFunction apply_gamma_eps(const GridFunction& phi, double eps);

/// min(|x|, 2).
inline double truncate_t2(double x) { return std::min(std::abs(x), 2.0); }

/// One CSV row of node values at 17 significant digits.
void write_csv_row(std::ostream& os, const GridFunction& phi);

}  // namespace mildlab
