#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fkfpe/config.hpp"
#include "fkfpe/grid.hpp"
#include "fkfpe/jko.hpp"
#include "fkfpe/kernel.hpp"
#include "fkfpe/potential.hpp"

namespace fkfpe {

/// Raised on the runner's abort conditions (leakage, contraction violation,
/// non-finite diagnostics). The CLI maps it to exit code 3.
struct SchemeAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DiagnosticsRecord {
    int step = 0;
    double t = 0.0;
    double mass = 0.0;
    double lp_p = 0.0;        // ||f||_p^p
    double m2v = 0.0;
    double m2v_bar = 0.0;     // second moment of the diffused iterate
    double epot = 0.0;
    double wh2 = 0.0;         // W_h^2 of the kinetic step
    double el_res = 0.0;      // EL defect against the standard probe
    double coupling_moment = 0.0;  // int (|x-x'|^2 + |v-v'|^2) dP of the step
    double diffusion_leak = 0.0;
    double kinetic_leak = 0.0;
    double wallclock = 0.0;   // seconds spent in this step
};

/// Discrete trajectory {f^n} with the per-step diagnostics and the
/// right-continuous fractional-flow interpolation between nodes.
struct Trajectory {
    SchemeConfig config;
    Potential psi;
    std::vector<DensityGrid> f;         // f[0] = f0, ..., f[N]
    std::vector<DensityGrid> fbar;      // stored only on request
    std::vector<DiagnosticsRecord> diag;

    int steps() const { return int(f.size()) - 1; }
    /// f_{h,R}(t) for 0 <= t <= T: fractional flow from the latest node
    /// (t = t_n returns f^n exactly; t = T returns f^N).
    DensityGrid interpolate(double t) const;
};

struct RunOptions {
    bool store_fbar = false;
    bool serial = false;          // force the serial kernels
    bool step_diagnostics = true; // fill lp/m2/epot/el fields (costs a little)
};

Trajectory run_scheme(const SchemeConfig& config, const DensityGrid& f0, const Potential& psi,
                      const RunOptions& opts = {});

// ---------------------------------------------------------------------------
// a priori diagnostics
// ---------------------------------------------------------------------------

/// Constants of the a priori inequalities, fitted on a coarse run and then
/// frozen. Values <= 0 mean "fit mode": the report returns the required
/// constants instead of checking them.
struct AprioriConstants {
    double Ca = 0.0;
    double Cb = 0.0;
    double Cd = 0.0;
};

struct AprioriReport {
    double mass_dev_max = 0.0;
    double min_value = 0.0;
    double sum_wh2 = 0.0;
    double shape_a = 0.0;      // h E_psi(f0) + T ||D2 Psi|| (h^{1/s} + h R^{2-2s})
    double shape_a_alt = 0.0;  // variant with h^{1/2} in place of h^{1/s}
    double shape_step = 0.0;   // h^{1/s} + h R^{2-2s}
    double Ca_required = 0.0;  // sum_wh2 / shape_a
    double Cb_required = 0.0;  // worst per-step second-moment excess / shape_step
    double Cd_required = 0.0;  // worst coupling-moment ratio
    double lp_ratio_max = 0.0; // vs exp(alpha t (1-p)) ||f0||_p^p along the run
    bool pass_a = false, pass_b = false, pass_c = false, pass_d = false;
};

AprioriReport apriori_report(const Trajectory& traj, const AprioriConstants* frozen = nullptr,
                             double lp_slack = 0.01);

// ---------------------------------------------------------------------------
// weak-form residual
// ---------------------------------------------------------------------------

/// Separable test function phi(t,x,v) = a(t) b(x) c(v), sampled on the grid,
/// carrying the time derivative and the spectral fractional Laplacian of the
/// velocity factor.
struct SpaceTimeTestFunction {
    std::function<double(double)> a, a_dot;
    std::vector<double> b, b_dx;
    std::vector<double> c, c_dv, c_frac;
};

/// Gaussian-in-v, Fourier-in-x probe; a(t) = cos^4(pi t / 2T) cuts off at T.
SpaceTimeTestFunction make_test_function(const GridGeom& g, double T, double s, int kx,
                                         double phase, double vc, double sc);
std::vector<SpaceTimeTestFunction> standard_battery(const GridGeom& g, double T, double s, int n);

/// |weak-form defect| of the interpolated trajectory for each test function,
/// by midpoint time quadrature with nsub sub-samples per step.
std::vector<double> weak_residual(const Trajectory& traj,
                                  const std::vector<SpaceTimeTestFunction>& battery,
                                  int nsub = 4);
double weak_residual(const Trajectory& traj, const SpaceTimeTestFunction& phi, int nsub = 4);

// ---------------------------------------------------------------------------
// convergence study
// ---------------------------------------------------------------------------

struct ConvergenceRow {
    double h = 0.0;
    double error_l1 = 0.0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;
    bool monotone = false;
};

/// L1 errors at time T against a reference provider, for configs that differ
/// only in h (and the coupled truncation radius). The order is the
/// least-squares slope of log error against log h.
ConvergenceTable convergence_study(const std::vector<SchemeConfig>& configs,
                                   const DensityGrid& f0, const Potential& psi,
                                   const std::function<DensityGrid(const SchemeConfig&)>& reference,
                                   const RunOptions& opts = {});

double fit_order(const std::vector<double>& hs, const std::vector<double>& errors);

}  // namespace fkfpe
