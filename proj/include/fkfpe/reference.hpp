#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fkfpe/config.hpp"
#include "fkfpe/grid.hpp"
#include "fkfpe/potential.hpp"

namespace fkfpe {

/// Independent oracles for the splitting scheme. None of these share
/// time-stepping or transport machinery with the scheme: the PDE reference
/// is a method-of-lines discretization (centered differences for transport
/// and drift, spectral multiplier for the fractional term, RK4 in time at
/// CFL-limited internal steps), the stochastic reference advances particles.

/// Weighted particle cloud; dim in {1,2,3}, coordinates stored interleaved.
struct ParticleEnsemble {
    int dim = 1;
    std::vector<double> x;  // size M * dim
    std::vector<double> v;  // size M * dim

    size_t size() const { return dim > 0 ? x.size() / dim : 0; }
    double weight() const { return 1.0 / double(size()); }
};

/// Terminal-time density of the full equation by the method of lines.
/// Homogeneous mode solves on the v-line (nx = 1 collapses transport).
DensityGrid reference_pde_solve(const SchemeConfig& config, const DensityGrid& f0,
                                const Potential& psi);

/// Transport-only variant (no fractional term), same discretization family.
DensityGrid reference_pde_solve_transport(const SchemeConfig& config, const DensityGrid& f0,
                                          const Potential& psi);

/// Splitting-consistent Monte Carlo: per step a truncated stable increment
/// in v, then the implicit drift substep and the x-update. Particle streams
/// derive from (seed, index), so runs are reproducible and thread-count
/// independent. OpenMP-parallel over particles.
ParticleEnsemble sde_simulate(const SchemeConfig& config,
                              const std::function<void(class Rng&, double&, double&)>& sample_f0,
                              const Potential& psi, size_t particles);
ParticleEnsemble sde_simulate_serial(const SchemeConfig& config,
                                     const std::function<void(class Rng&, double&, double&)>& sample_f0,
                                     const Potential& psi, size_t particles);

/// Exact (up to ODE tolerance) solution of the kinetic transport equation as
/// an empirical measure: flows particles along xdot = v, vdot = -grad Psi(v)
/// with fixed-step RK4 at step <= 1/512.
ParticleEnsemble characteristics_transport(const ParticleEnsemble& f0, const Potential& psi,
                                           double T);

/// Pointwise density of the kinetic transport solution with quadratic
/// potential, evaluated by flowing cell centers backward along the exact
/// characteristics (v0 = v e^{kT}, x0 = x - v (e^{kT} - 1)/k, density * e^{kT}).
DensityGrid characteristics_exact_density(const GridGeom& g, const Potential& psi, double T,
                                          const std::function<double(double, double)>& f0);

/// Stationary law of the homogeneous equation with quadratic potential:
/// density with characteristic function exp(-|xi|^{2s} / (2s)), sampled on
/// the v-grid cell centers, clipped and normalized.
struct StationaryLaw {
    double s = 1.0;
    int nv = 0;
    double Lv = 0.0;
    std::vector<double> density;  // on cell centers
};

StationaryLaw stationary_stable(double s, int nv, double Lv);

/// Kolmogorov-Smirnov distance between a particle v-sample and a grid
/// v-marginal (both restricted to the grid window).
double ks_distance_v(const ParticleEnsemble& particles, const DensityGrid& f);

}  // namespace fkfpe
