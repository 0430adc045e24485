#pragma once

#include <vector>

#include "fkfpe/accel.hpp"

namespace fkfpe {

/// Discrete coupling between a source of n atoms and a target of m atoms.
struct TransportPlan {
    struct Entry {
        int i, j;
        double w;
    };
    int n = 0, m = 0;
    std::vector<Entry> entries;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
    /// max |row sum - a| and |col sum - b| over all marginals
    double marginal_error(const std::vector<double>& a, const std::vector<double>& b) const;
    double cost(const std::vector<double>& c_matrix) const;  // row-major n x m
};

struct OtResult {
    double value = 0.0;  // optimal transport cost (not the square root)
    TransportPlan plan;
    bool converged = true;
    double marginal_error = 0.0;
    int iterations = 0;
};

/// Exact minimum-cost transport between weighted atom sets for an arbitrary
/// dense cost matrix (row-major n x m), by network simplex on the complete
/// bipartite graph. Weights must each sum to 1. Combined support is capped
/// at 4096 atoms.
OtResult exact_transport(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& cost);

/// Entropic-regularized transport by log-domain Sinkhorn iteration.
/// Stops when the worst marginal violation drops below `tol`.
OtResult entropic_transport(const std::vector<double>& a, const std::vector<double>& b,
                            const std::vector<double>& cost, double eps, int max_iter = 5000,
                            double tol = 1e-9);

/// One proximal step of a linear energy under entropic transport: minimizes
/// <C, pi> + eps KL(pi | uniform) + <e, pi^T 1> with the row marginal fixed
/// at `a` and the column marginal free. With a linear energy the scaling
/// iteration closes after a single row normalization, so the minimizer is
/// exact. Returns the plan and its unregularized cost.
OtResult prox_linear_energy(const std::vector<double>& a, const std::vector<double>& cost,
                            const std::vector<double>& energy, int m, double eps);

/// 2-Wasserstein distance between discrete phase-space measures
/// (squared Euclidean ground cost). Returns the distance, not its square.
std::pair<double, TransportPlan> w2_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
std::pair<double, TransportPlan> w2_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             double eps, int max_iter = 5000);

}  // namespace fkfpe
