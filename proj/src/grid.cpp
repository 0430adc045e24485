#include "fkfpe/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkfpe/potential.hpp"

namespace fkfpe {

namespace {
bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }
}

GridGeom::GridGeom(int nx_, int nv_, double Lx_, double Lv_)
    : nx(nx_), nv(nv_), Lx(Lx_), Lv(Lv_) {
    if (!power_of_two(nx) || !power_of_two(nv))
        throw std::invalid_argument("grid resolution must be a power of two");
    if (Lx <= 0.0 || Lv <= 0.0)
        throw std::invalid_argument("domain extents must be positive");
}

double GridGeom::wrap_x(double x) const {
    double p = 2.0 * Lx;
    double y = std::fmod(x + Lx, p);
    if (y < 0.0) y += p;
    return y - Lx;
}

double DensityGrid::min_value() const {
    if (vals_.empty()) return 0.0;
    return *std::min_element(vals_.begin(), vals_.end());
}

void DensityGrid::normalize() {
    double m = mass(*this);
    if (!(m > 0.0)) throw std::runtime_error("cannot normalize a massless grid");
    double inv = 1.0 / m;
    for (double& x : vals_) x *= inv;
}

double mass(const DensityGrid& f) {
    double s = 0.0;
    for (double x : f.values()) s += x;
    return s * f.geom().cell();
}

double lp_norm_p(const DensityGrid& f, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("lp_norm_p requires p > 1");
    double s = 0.0;
    for (double x : f.values()) s += std::pow(std::abs(x), p);
    return s * f.geom().cell();
}

double second_moment_v(const DensityGrid& f) {
    const GridGeom& g = f.geom();
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double* r = f.row(i);
        for (int j = 0; j < g.nv; ++j) {
            double v = g.v(j);
            s += v * v * r[j];
        }
    }
    return s * g.cell();
}

double potential_energy(const DensityGrid& f, const Potential& psi) {
    const GridGeom& g = f.geom();
    double s = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double* r = f.row(i);
        for (int j = 0; j < g.nv; ++j) s += psi(g.v(j)) * r[j];
    }
    return s * g.cell();
}

std::vector<double> v_marginal(const DensityGrid& f) {
    const GridGeom& g = f.geom();
    std::vector<double> m(g.nv, 0.0);
    for (int i = 0; i < g.nx; ++i) {
        const double* r = f.row(i);
        for (int j = 0; j < g.nv; ++j) m[j] += r[j];
    }
    for (double& x : m) x *= g.dx();
    return m;
}

DensityGrid gaussian_density(const GridGeom& g, double x0, double v0, double sx, double sv) {
    DensityGrid f(g);
    for (int i = 0; i < g.nx; ++i) {
        double ex = std::exp(-0.5 * std::pow((g.x(i) - x0) / sx, 2));
        double* r = f.row(i);
        for (int j = 0; j < g.nv; ++j)
            r[j] = ex * std::exp(-0.5 * std::pow((g.v(j) - v0) / sv, 2));
    }
    f.normalize();
    return f;
}

}  // namespace fkfpe
