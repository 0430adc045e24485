#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace fkfpe {

/// Uniform phase-space grid on [-Lx,Lx) x [-Lv,Lv), cell-centered.
/// x is periodic, v is truncated with zero padding outside the window.
struct GridGeom {
    int nx = 0;
    int nv = 0;
    double Lx = 0.0;
    double Lv = 0.0;

    GridGeom() = default;
    GridGeom(int nx_, int nv_, double Lx_, double Lv_);

    double dx() const { return 2.0 * Lx / nx; }
    double dv() const { return 2.0 * Lv / nv; }
    double cell() const { return dx() * dv(); }
    double x(int i) const { return -Lx + (i + 0.5) * dx(); }
    double v(int j) const { return -Lv + (j + 0.5) * dv(); }
    /// Wraps a position into [-Lx, Lx).
    double wrap_x(double x) const;

    bool operator==(const GridGeom&) const = default;
};

/// Nonnegative mass density sampled at cell centers, row-major in x.
class DensityGrid {
public:
    DensityGrid() = default;
    explicit DensityGrid(const GridGeom& g) : geom_(g), vals_(size_t(g.nx) * g.nv, 0.0) {}

    const GridGeom& geom() const { return geom_; }
    double& operator()(int i, int j) { return vals_[size_t(i) * geom_.nv + j]; }
    double operator()(int i, int j) const { return vals_[size_t(i) * geom_.nv + j]; }
    double* row(int i) { return vals_.data() + size_t(i) * geom_.nv; }
    const double* row(int i) const { return vals_.data() + size_t(i) * geom_.nv; }
    std::vector<double>& values() { return vals_; }
    const std::vector<double>& values() const { return vals_; }

    double min_value() const;
    /// Rescales to unit mass; throws if the grid carries no mass.
    void normalize();

private:
    GridGeom geom_;
    std::vector<double> vals_;
};

double mass(const DensityGrid& f);
/// Integral of |f|^p by midpoint quadrature; requires p > 1.
double lp_norm_p(const DensityGrid& f, double p);
/// M_{2,v}(f) = integral of |v|^2 f.
double second_moment_v(const DensityGrid& f);

/// Column sums times dx: the v-marginal density on the v-grid.
std::vector<double> v_marginal(const DensityGrid& f);

/// Normalized Gaussian bump exp(-(x-x0)^2/2sx^2 - (v-v0)^2/2sv^2).
DensityGrid gaussian_density(const GridGeom& g, double x0, double v0, double sx, double sv);

}  // namespace fkfpe
