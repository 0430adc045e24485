#include "fkfpe/accel.hpp"

#include <cmath>
#include <stdexcept>

#include "fkfpe/ot.hpp"

namespace fkfpe {

void DiscreteMeasure::validate() const {
    if (support.empty() || support.size() != weights.size())
        throw std::invalid_argument("degenerate discrete measure");
    double s = 0.0;
    for (double w : weights) {
        if (w < -1e-15) throw std::invalid_argument("negative weight in measure");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("measure weights must sum to 1");
    for (const auto& p : support)
        if (!std::isfinite(p.x) || !std::isfinite(p.v))
            throw std::invalid_argument("non-finite support point");
}

double cost_ch(double h, const PhasePoint& a, const PhasePoint& b) {
    if (!(h > 0.0)) throw std::invalid_argument("cost_ch requires h > 0");
    double dv = b.v - a.v;
    double slope = (b.x - a.x) / h - 0.5 * (a.v + b.v);
    return dv * dv + 12.0 * slope * slope;
}

double cubic_oracle(double h, const PhasePoint& a, const PhasePoint& b) {
    if (!(h > 0.0)) throw std::invalid_argument("cubic_oracle requires h > 0");
    // Hermite cubic xi(t) = x + v t + c2 t^2 + c3 t^3 through the endpoint data
    double dx = b.x - a.x;
    double c2 = 3.0 * dx / (h * h) - (2.0 * a.v + b.v) / h;
    double c3 = -2.0 * dx / (h * h * h) + (a.v + b.v) / (h * h);
    // 2-point Gauss-Legendre on [0,h], exact for the quadratic |xi''|^2
    const double r = 0.5 / std::sqrt(3.0);
    double t1 = h * (0.5 - r), t2 = h * (0.5 + r);
    auto acc2 = [&](double t) {
        double acc = 2.0 * c2 + 6.0 * c3 * t;
        return acc * acc;
    };
    double integral = 0.5 * h * (acc2(t1) + acc2(t2));
    return h * integral;
}

PhasePoint map_Fh(double h, const PhasePoint& p) {
    if (!(h > 0.0)) throw std::invalid_argument("map_Fh requires h > 0");
    return {p.x + h * p.v, p.v};
}

PhasePoint map_Gh(double h, const PhasePoint& p) {
    if (!(h > 0.0)) throw std::invalid_argument("map_Gh requires h > 0");
    return {std::sqrt(3.0) * (2.0 * p.x / h - p.v), p.v};
}

PhasePoint map_Gh_inv(double h, const PhasePoint& p) {
    if (!(h > 0.0)) throw std::invalid_argument("map_Gh_inv requires h > 0");
    return {0.5 * h * (p.x / std::sqrt(3.0) + p.v), p.v};
}

DiscreteMeasure pushforward(const DiscreteMeasure& mu, PhasePoint (*map)(double, const PhasePoint&),
                            double h) {
    DiscreteMeasure out = mu;
    for (auto& p : out.support) p = map(h, p);
    return out;
}

std::pair<double, TransportPlan> wh(double h, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu) {
    mu.validate();
    nu.validate();
    DiscreteMeasure src = mu, tgt = nu;
    for (auto& p : src.support) p = map_Gh(h, map_Fh(h, p));
    for (auto& p : tgt.support) p = map_Gh(h, p);
    auto [w2, plan] = w2_exact(src, tgt);
    return {w2, std::move(plan)};  // atom indices are untouched by the maps
}

std::pair<double, TransportPlan> wh_direct_lp(double h, const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu) {
    mu.validate();
    nu.validate();
    size_t n = mu.size(), m = nu.size();
    std::vector<double> cost(n * m);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < m; ++j)
            cost[i * m + j] = cost_ch(h, mu.support[i], nu.support[j]);
    OtResult r = exact_transport(mu.weights, nu.weights, cost);
    return {std::sqrt(std::max(r.value, 0.0)), std::move(r.plan)};
}

}  // namespace fkfpe
