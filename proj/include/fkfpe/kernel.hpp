#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "fkfpe/grid.hpp"
#include "fkfpe/potential.hpp"

namespace fkfpe {

/// Fractional heat kernel Phi_s(.,t) sampled on the v-offset lattice
/// {k dv : k in [-nv, nv)}. Index m holds offset (m - nv) dv.
///
/// Construction is spectral: the multiplier exp(-t |xi|^{2s}) is sampled on a
/// lattice 4x finer and 2x wider than the offset window, inverse-transformed,
/// and folded onto the window (period 4 Lv). The fold makes the discrete L1
/// equal the multiplier trace, which is 1 up to the resolved-scale cutoff.
struct KernelTable {
    double s = 1.0;
    double t = 0.0;
    double R = std::numeric_limits<double>::infinity();
    int nv = 0;
    double Lv = 0.0;
    std::vector<double> vals;                 // 2 nv samples
    std::vector<std::complex<double>> spectrum;  // rfft of the circular layout, times dv
    double l1 = 0.0;                          // discrete L1 before renormalization
    bool renormalized = false;

    double dv() const { return 2.0 * Lv / nv; }
    double offset(int m) const { return (m - nv) * dv(); }
    double l1_current() const;
    /// Quadrature second moment over the overlap-weighted ball B_R
    /// divided by the ball mass; R = infinity uses the whole window.
    double ball_moment_ratio(double R) const;
};

KernelTable build_kernel(double s, double t, int nv, double Lv);
/// t -> 0 limit: the discrete identity for the lattice convolution.
KernelTable delta_kernel(double s, int nv, double Lv);
/// Zeroes samples outside B_R (boundary cells keep their overlap fraction)
/// and rescales to discrete mass one. Rejects balls narrower than one cell.
KernelTable truncate_renormalize(const KernelTable& k, double R);
/// Rescales to discrete mass one without truncation.
KernelTable renormalize(const KernelTable& k);

/// E[|W|^2 1_{B_R}] / P(B_R) for the law with density Phi_s(., h).
double moment_ratio(double s, double h, double R, int nv, double Lv);

struct DiffusionResult {
    DensityGrid f;
    double leak = 0.0;  // mass carried past the v-window this step
};

/// Renormalised convolution in v, per x-slice (eq. of the diffusion phase).
/// The kernel must be renormalized. OpenMP-parallel over x-slices.
DiffusionResult diffusion_step(const DensityGrid& f, const KernelTable& k);
/// Serial reference implementation, kept for testing and benchmarks.
DiffusionResult diffusion_step_serial(const DensityGrid& f, const KernelTable& k);

/// Exact discrete fractional flow over time tau >= 0 (zero-padded spectral
/// multiplier). Used by the time interpolation between scheme nodes.
DiffusionResult spectral_flow(const DensityGrid& f, double tau, double s);
DiffusionResult spectral_flow_serial(const DensityGrid& f, double tau, double s);

/// Returns (integral Psi fbar, integral Psi f + 0.5 ||D^2 Psi|| * moment ratio);
/// the first is bounded by the second up to quadrature tolerance.
std::pair<double, double> potential_inflation_check(const DensityGrid& f, const Potential& psi,
                                                    double s, double h, double R);

/// Samples a general symmetric spectral profile mult(xi) on the v-grid cell
/// centers (used for stationary laws). Clipped at zero, not normalized.
std::vector<double> sample_multiplier_on_centers(const std::function<double(double)>& mult,
                                                 int nv, double Lv);

/// One increment of the 2s-stable process over time h: scale h^{1/(2s)} times
/// a standard symmetric draw (Chambers-Mallows-Stuck), rejected to |w| <= R.
double sample_stable_increment(class Rng& rng, double s, double h,
                               double R = std::numeric_limits<double>::infinity());

}  // namespace fkfpe
