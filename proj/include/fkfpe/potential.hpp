#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace fkfpe {

/// Friction potential Psi(v): nonnegative, C^{1,1} with a finite Hessian bound
/// on the working velocity window.
struct Potential {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> grad;
    double hessian_sup = 0.0;

    double operator()(double v) const { return eval(v); }
};

inline Potential zero_potential() {
    return {"zero", [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0};
}

inline Potential quadratic_potential(double k = 1.0) {
    return {"quadratic",
            [k](double v) { return 0.5 * k * v * v; },
            [k](double v) { return k * v; },
            k};
}

/// Psi(v) = k v^4 / 4. The Hessian bound is taken over |v| <= Lv.
inline Potential quartic_potential(double Lv, double k = 1.0) {
    return {"quartic",
            [k](double v) { return 0.25 * k * v * v * v * v; },
            [k](double v) { return k * v * v * v; },
            3.0 * k * Lv * Lv};
}

inline Potential make_potential(const std::string& name, double Lv, double scale = 1.0) {
    if (name == "zero") return zero_potential();
    if (name == "quadratic") return quadratic_potential(scale);
    if (name == "quartic") return quartic_potential(Lv, scale);
    throw std::invalid_argument("unknown potential: " + name);
}

double potential_energy(const class DensityGrid& f, const Potential& psi);

}  // namespace fkfpe
