#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fkfpe/grid.hpp"
#include "fkfpe/ot.hpp"
#include "fkfpe/potential.hpp"

namespace fkfpe {

/// Solves S + h grad Psi(S) = v (the proximal point of Psi at v). Requires
/// the contraction condition h ||D^2 Psi|| < 1; damped Newton with a
/// bisection fallback on the monotone scalar equation, residual <= 1e-12.
double implicit_velocity_map(const Potential& psi, double h, double v);

struct JkoResult {
    DensityGrid f;
    double objective = 0.0;   // (1/2h) W_h^2 + potential energy of f
    double wh2 = 0.0;         // W_h^2 of the step coupling
    double leak = 0.0;        // velocity mass clamped at the v-boundary
    std::string path;         // "map" or "variational"
    // variational path: the optimal coupling, source/target = linear cell ids
    std::optional<TransportPlan> plan;
};

struct JkoOptions {
    bool homogeneous = false;  // collapse the x-update (spatially homogeneous run)
};

/// Kinetic-transport phase by the closed-form optimal map
/// (x, v) -> (x + h (v + S(v))/2, S(v)), deposited bilinearly.
/// OpenMP-parallel over source columns; bit-identical to the serial path.
JkoResult jko_map_step(const DensityGrid& fbar, const Potential& psi, double h,
                       const JkoOptions& opt = {});
JkoResult jko_map_step_serial(const DensityGrid& fbar, const Potential& psi, double h,
                              const JkoOptions& opt = {});

/// Kinetic-transport phase by direct minimization over grid-supported
/// candidates: entropic optimal transport in the coordinates of the
/// W_2 reduction, with the x-difference taken periodically. Validates the
/// map derivation; requires the grid to fit the OT support cap.
JkoResult jko_variational_step(const DensityGrid& fbar, const Potential& psi, double h,
                               double eps);

/// Smooth compactly supported test function with its phase-space gradient.
struct PhaseTestFunction {
    std::function<double(double, double)> phi;
    std::function<double(double, double)> dphi_dx;
    std::function<double(double, double)> dphi_dv;
};

/// Absolute defect of the step's Euler-Lagrange identity for one test
/// function, evaluated with the step's coupling (deterministic map coupling
/// or the variational plan).
double el_residual(const DensityGrid& fbar, const JkoResult& step, const Potential& psi,
                   double h, const PhaseTestFunction& phi);

}  // namespace fkfpe
