#include "mildlab/grid_space.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

namespace mildlab {

Grid::Grid(std::size_t interior_points) : m_(interior_points), h_(1.0 / static_cast<double>(interior_points + 1)) {
    if (interior_points < 1) throw InvalidArgument("Grid: need at least one interior point");
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw GridMismatch("GridFunction: value count does not match grid");
    for (double v : values_)
        if (!std::isfinite(v)) throw NonFiniteInput("GridFunction: non-finite value");
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("grid functions live on different grids");
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

double lq_norm(const GridFunction& phi, double q) {
    if (!(q >= 1.0)) throw InvalidExponent("lq_norm: q must be >= 1");
    const double h = phi.grid().spacing();
    double sum = 0.0;
    if (q == 1.0) {
        for (double v : phi.values()) sum += std::abs(v);
        return h * sum;
    }
    if (q == 2.0) {
        for (double v : phi.values()) sum += v * v;
        return std::sqrt(h * sum);
    }
    // Scale by the max to keep large exponents from overflowing.
    const double peak = max_norm(phi);
    if (peak == 0.0) return 0.0;
    for (double v : phi.values()) sum += std::pow(std::abs(v) / peak, q);
    return peak * std::pow(h * sum, 1.0 / q);
}

double max_norm(const GridFunction& phi) {
    double m = 0.0;
    for (double v : phi.values()) m = std::max(m, std::abs(v));
    return m;
}

double pairing(const GridFunction& phi, const GridFunction& psi) {
    require_same_grid(phi, psi);
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) sum += phi[i] * psi[i];
    return phi.grid().spacing() * sum;
}

double jq_scalar(double x, double q) {
    if (!(q >= 1.0)) throw InvalidExponent("jq_scalar: q must be >= 1");
    if (x == 0.0) return 0.0;
    if (q == 2.0) return x;
    if (q == 1.0) return x > 0.0 ? 1.0 : -1.0;
    return std::copysign(std::pow(std::abs(x), q - 1.0), x);
}

GridFunction duality_map(const GridFunction& phi, double q) {
    if (!(q > 1.0)) throw InvalidExponent("duality_map: q must be > 1");
    GridFunction out(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = jq_scalar(phi[i], q);
    return out;
}

double bracket_l1(const GridFunction& x, const GridFunction& y) {
    require_same_grid(x, y);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0)
            sum += y[i];
        else if (x[i] < 0.0)
            sum -= y[i];
        else
            sum += std::abs(y[i]);
    }
    return x.grid().spacing() * sum;
}

double gamma_eps(double x, double eps) {
    const double s = std::sqrt(eps);
    if (x >= 0.5 * s) return 1.0;
    if (x <= -0.5 * s) return -1.0;
    return 2.0 * x / s;
}

double big_gamma0(double x, double eps) {
    const double s = std::sqrt(eps);
    const double a = std::abs(x);
    if (a >= 0.5 * s) return a;
    return 0.25 * s + x * x / s;
}

double big_gamma(const GridFunction& phi, double eps) {
    double sum = 0.0;
    for (double v : phi.values()) sum += big_gamma0(v, eps);
    return phi.grid().spacing() * sum;
}

GridFunction apply_gamma_eps(const GridFunction& phi, double eps) {
    GridFunction out(phi.grid());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = gamma_eps(phi[i], eps);
    return out;
}

void write_csv_row(std::ostream& os, const GridFunction& phi) {
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (i) os << ',';
        os << phi[i];
    }
    os << '\n';
    os.precision(old);
}

}  // namespace mildlab
