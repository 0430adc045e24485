#pragma once

#include <utility>
#include <vector>

namespace fkfpe {

struct PhasePoint {
    double x = 0.0;
    double v = 0.0;
};

/// Finitely supported probability measure on phase space.
struct DiscreteMeasure {
    std::vector<PhasePoint> support;
    std::vector<double> weights;

    size_t size() const { return support.size(); }
    /// Throws unless weights are nonnegative and sum to 1 within 1e-12.
    void validate() const;
};

/// Minimal average acceleration cost over time h between phase states,
/// C_h = |v'-v|^2 + 12 |(x'-x)/h - (v'+v)/2|^2.
double cost_ch(double h, const PhasePoint& a, const PhasePoint& b);

/// h * integral over [0,h] of the squared second derivative of the cubic
/// Hermite interpolant joining (a at 0) to (b at h); agrees with cost_ch by
/// the minimality of the cubic. Evaluated by Gauss-Legendre quadrature,
/// exact for the quadratic integrand, so the two routes share no algebra.
double cubic_oracle(double h, const PhasePoint& a, const PhasePoint& b);

PhasePoint map_Fh(double h, const PhasePoint& p);      // (x + h v, v)
PhasePoint map_Gh(double h, const PhasePoint& p);      // (sqrt3 (2x/h - v), v)
PhasePoint map_Gh_inv(double h, const PhasePoint& p);  // ((h/2)(y/sqrt3 + v), v)

DiscreteMeasure pushforward(const DiscreteMeasure& mu, PhasePoint (*map)(double, const PhasePoint&),
                            double h);

/// Kantorovich functional W_h via the reduction W_h(mu,nu) =
/// W_2((G_h o F_h)# mu, G_h# nu); the returned coupling is expressed in the
/// original atom indices.
std::pair<double, struct TransportPlan> wh(double h, const DiscreteMeasure& mu,
                                           const DiscreteMeasure& nu);

/// Direct linear-program route: minimizes sum C_h(a_i, b_j) pi_ij over
/// couplings. Used as the independent cross-check of the reduction.
std::pair<double, struct TransportPlan> wh_direct_lp(double h, const DiscreteMeasure& mu,
                                                     const DiscreteMeasure& nu);

}  // namespace fkfpe
