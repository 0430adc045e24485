#include <cmath>
#include <stdexcept>

#include "fkfpe/kernel.hpp"
#include "fkfpe/rng.hpp"

namespace fkfpe {

namespace {

/// Standard symmetric alpha-stable draw, Chambers-Mallows-Stuck form.
/// Characteristic function exp(-|xi|^alpha); alpha = 1 is the Cauchy branch.
double standard_stable(Rng& rng, double alpha) {
    double U = M_PI * (rng.uniform() - 0.5);
    if (std::abs(alpha - 1.0) < 1e-14) return std::tan(U);
    double W = -std::log(rng.uniform());
    double t1 = std::sin(alpha * U) / std::pow(std::cos(U), 1.0 / alpha);
    double t2 = std::pow(std::cos((1.0 - alpha) * U) / W, (1.0 - alpha) / alpha);
    return t1 * t2;
}

}  // namespace

double sample_stable_increment(Rng& rng, double s, double h, double R) {
    if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("s must lie in (0, 1]");
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    double alpha = 2.0 * s;
    double scale = std::pow(h, 1.0 / alpha);
    for (;;) {
        double w = scale * standard_stable(rng, alpha);
        if (std::abs(w) <= R) return w;
    }
}

}  // namespace fkfpe
