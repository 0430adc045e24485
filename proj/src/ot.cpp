#include "fkfpe/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fkfpe {

std::vector<double> TransportPlan::row_sums() const {
    std::vector<double> r(n, 0.0);
    for (const auto& e : entries) r[e.i] += e.w;
    return r;
}

std::vector<double> TransportPlan::col_sums() const {
    std::vector<double> c(m, 0.0);
    for (const auto& e : entries) c[e.j] += e.w;
    return c;
}

double TransportPlan::marginal_error(const std::vector<double>& a,
                                     const std::vector<double>& b) const {
    double err = 0.0;
    auto r = row_sums();
    auto c = col_sums();
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(r[i] - a[i]));
    for (int j = 0; j < m; ++j) err = std::max(err, std::abs(c[j] - b[j]));
    return err;
}

double TransportPlan::cost(const std::vector<double>& c_matrix) const {
    double s = 0.0;
    for (const auto& e : entries) s += e.w * c_matrix[size_t(e.i) * m + e.j];
    return s;
}

namespace {

// ---------------------------------------------------------------------------
// Transportation network simplex on the complete bipartite graph.
//
// Nodes 0..n-1 are sources, n..n+m-1 sinks. The basis is a spanning tree kept
// as parent pointers with the arc flow stored at the child end. Entering arcs
// are priced by block search over the dense cost matrix.
// ---------------------------------------------------------------------------
class NetworkSimplex {
public:
    NetworkSimplex(const std::vector<double>& a, const std::vector<double>& b,
                   const std::vector<double>& cost)
        : n_(int(a.size())), m_(int(b.size())), c_(cost), a_(a), b_(b) {
        N_ = n_ + m_;
        parent_.assign(N_, -1);
        pflow_.assign(N_, 0.0);
        depth_.assign(N_, 0);
        u_.assign(N_, 0.0);
        double cmax = 1e-30;
        for (double x : c_) cmax = std::max(cmax, std::abs(x));
        tol_ = 1e-12 * cmax;
        init_northwest();
    }

    // Returns the optimal cost; fills `plan`.
    double run(TransportPlan& plan) {
        const long max_pivots = 50L * N_ * N_ + 10000;
        long it = 0;
        int block = std::max(16, int(std::sqrt(double(n_) * m_)));
        int cursor = 0;
        const long total = long(n_) * m_;
        update_potentials_full();
        while (it++ < max_pivots) {
            // block pricing: scan `block`-sized chunks until a negative
            // reduced cost shows up, remembering the best in the chunk
            int best_i = -1, best_j = -1;
            double best_r = -tol_;
            long scanned = 0;
            while (scanned < total) {
                long endc = std::min<long>(scanned + block, total);
                for (; scanned < endc; ++scanned) {
                    long idx = (cursor + scanned) % total;
                    int i = int(idx / m_), j = int(idx % m_);
                    double r = c_[idx] - u_[i] - u_[n_ + j];
                    if (r < best_r) {
                        best_r = r;
                        best_i = i;
                        best_j = j;
                    }
                }
                if (best_i >= 0) break;
            }
            if (best_i < 0) break;  // optimal
            cursor = (cursor + scanned) % total;
            pivot(best_i, n_ + best_j);
        }
        plan.n = n_;
        plan.m = m_;
        plan.entries.clear();
        double total_cost = 0.0;
        for (int v = 0; v < N_; ++v) {
            if (parent_[v] < 0 || pflow_[v] <= 0.0) continue;
            int i = v < n_ ? v : parent_[v];
            int j = v < n_ ? parent_[v] - n_ : v - n_;
            plan.entries.push_back({i, j, pflow_[v]});
            total_cost += pflow_[v] * c_[size_t(i) * m_ + j];
        }
        return total_cost;
    }

private:
    int n_, m_, N_;
    const std::vector<double>& c_;
    std::vector<double> a_, b_;
    std::vector<int> parent_;     // tree parent (-1 at the root)
    std::vector<double> pflow_;   // flow on the arc to the parent
    std::vector<int> depth_;
    std::vector<double> u_;       // node potentials
    double tol_;

    double cost_arc(int x, int y) const {  // x source node, y sink node
        return c_[size_t(x) * m_ + (y - n_)];
    }

    // Northwest-corner start: consumes supplies/demands in index order.
    // The visited arcs form a spanning tree (degenerate zeros included).
    void init_northwest() {
        std::vector<double> a = a_, b = b_;
        int i = 0, j = 0;
        int root = 0;
        parent_[root] = -1;
        depth_[root] = 0;
        while (i < n_ && j < m_) {
            double f = std::min(a[i], b[j]);
            a[i] -= f;
            b[j] -= f;
            int src = i, snk = n_ + j;
            // attach whichever endpoint is new
            if (parent_[snk] == -1 && snk != root) {
                parent_[snk] = src;
                pflow_[snk] = f;
                depth_[snk] = depth_[src] + 1;
            } else if (parent_[src] == -1 && src != root) {
                parent_[src] = snk;
                pflow_[src] = f;
                depth_[src] = depth_[snk] + 1;
            }
            bool adv_i;
            if (i == n_ - 1) adv_i = false;
            else if (j == m_ - 1) adv_i = true;
            else adv_i = a[i] <= b[j];
            if (adv_i) ++i;
            else ++j;
        }
    }

    void update_potentials_full() {
        // root potential 0; walk the tree in depth order
        std::vector<int> order(N_);
        for (int v = 0; v < N_; ++v) order[v] = v;
        std::sort(order.begin(), order.end(), [&](int x, int y) { return depth_[x] < depth_[y]; });
        for (int v : order) {
            int p = parent_[v];
            if (p < 0) {
                u_[v] = 0.0;
                continue;
            }
            if (v >= n_) u_[v] = cost_arc(p, v) - u_[p];
            else u_[v] = cost_arc(v, p) - u_[p];
        }
    }

    void pivot(int ei, int ej) {
        // cycle: path ei -> root and ej -> root; flow alternates sign along
        // the two legs. Even hops from ei (and odd hops from ej) are the
        // "plus" direction.
        int x = ei, y = ej;
        // climb to equal depth
        std::vector<int> leg_i, leg_j;
        while (depth_[x] > depth_[y]) {
            leg_i.push_back(x);
            x = parent_[x];
        }
        while (depth_[y] > depth_[x]) {
            leg_j.push_back(y);
            y = parent_[y];
        }
        while (x != y) {
            leg_i.push_back(x);
            leg_j.push_back(y);
            x = parent_[x];
            y = parent_[y];
        }
        // walking up from either entering endpoint, arcs at even positions
        // (0-based) lose flow, odd positions gain; the bipartite cycle keeps
        // the alternation consistent at the apex
        double theta = std::numeric_limits<double>::infinity();
        int leave = -1;
        bool leave_on_i = true;
        for (size_t k = 0; k < leg_i.size(); k += 2) {
            if (pflow_[leg_i[k]] < theta - 1e-18) {
                theta = pflow_[leg_i[k]];
                leave = leg_i[k];
                leave_on_i = true;
            }
        }
        for (size_t k = 0; k < leg_j.size(); k += 2) {
            if (pflow_[leg_j[k]] < theta - 1e-18) {
                theta = pflow_[leg_j[k]];
                leave = leg_j[k];
                leave_on_i = false;
            }
        }
        if (leave < 0) {  // both legs empty cannot happen; guard anyway
            return;
        }
        // apply flow change
        for (size_t k = 0; k < leg_i.size(); ++k)
            pflow_[leg_i[k]] += (k % 2 == 0) ? -theta : theta;
        for (size_t k = 0; k < leg_j.size(); ++k)
            pflow_[leg_j[k]] += (k % 2 == 0) ? -theta : theta;
        // re-hang the entering arc: reverse parent pointers from the entering
        // endpoint down to the leaving arc, on the leg containing `leave`
        int from = leave_on_i ? ei : ej;
        int other = leave_on_i ? ej : ei;
        // reverse the chain from -> ... -> leave
        int prev = other;
        double carry = theta;
        int node = from;
        double prev_flow = carry;
        while (true) {
            int next = parent_[node];
            double next_flow = pflow_[node];
            parent_[node] = prev;
            pflow_[node] = prev_flow;
            if (node == leave) break;
            prev = node;
            prev_flow = next_flow;
            node = next;
        }
        refresh_subtree(from);
    }

    // Recomputes depths and potentials of the re-hung subtree.
    void refresh_subtree(int root) {
        // children lists are implicit; rebuild for the affected component by
        // a full recompute (grids here are small enough that simplicity wins)
        std::vector<std::vector<int>> kids(N_);
        for (int v = 0; v < N_; ++v)
            if (parent_[v] >= 0) kids[parent_[v]].push_back(v);
        std::vector<int> stack{root};
        int p = parent_[root];
        depth_[root] = depth_[p] + 1;
        if (root >= n_) u_[root] = cost_arc(p, root) - u_[p];
        else u_[root] = cost_arc(root, p) - u_[p];
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : kids[v]) {
                depth_[w] = depth_[v] + 1;
                if (w >= n_) u_[w] = cost_arc(v, w) - u_[v];
                else u_[w] = cost_arc(w, v) - u_[v];
                stack.push_back(w);
            }
        }
    }
};

void check_weights(const std::vector<double>& w, const char* who) {
    if (w.empty()) throw std::invalid_argument(std::string(who) + ": empty measure");
    double s = 0.0;
    for (double x : w) {
        if (x < -1e-15) throw std::invalid_argument(std::string(who) + ": negative weight");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": weights must sum to 1");
}

}  // namespace

OtResult exact_transport(const std::vector<double>& a, const std::vector<double>& b,
                         const std::vector<double>& cost) {
    check_weights(a, "source");
    check_weights(b, "target");
    if (a.size() + b.size() > 4096)
        throw std::invalid_argument("exact_transport: combined support exceeds 4096 atoms");
    if (cost.size() != a.size() * b.size())
        throw std::invalid_argument("exact_transport: cost matrix size mismatch");
    OtResult res;
    NetworkSimplex ns(a, b, cost);
    res.value = ns.run(res.plan);
    res.marginal_error = res.plan.marginal_error(a, b);
    return res;
}

OtResult entropic_transport(const std::vector<double>& a, const std::vector<double>& b,
                            const std::vector<double>& cost, double eps, int max_iter,
                            double tol) {
    check_weights(a, "source");
    check_weights(b, "target");
    if (!(eps > 0.0)) throw std::invalid_argument("entropic_transport: eps must be positive");
    const int n = int(a.size()), m = int(b.size());
    std::vector<double> f(n, 0.0), g(m, 0.0), la(n), lb(m);
    const double neg_inf = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) la[i] = a[i] > 0 ? std::log(a[i]) : neg_inf;
    for (int j = 0; j < m; ++j) lb[j] = b[j] > 0 ? std::log(b[j]) : neg_inf;

    auto lse_rows = [&](std::vector<double>& out) {
        // out_i = LSE_j (g_j - C_ij)/eps
        for (int i = 0; i < n; ++i) {
            double mx = neg_inf;
            const double* ci = cost.data() + size_t(i) * m;
            for (int j = 0; j < m; ++j) mx = std::max(mx, (g[j] - ci[j]) / eps);
            double ssum = 0.0;
            for (int j = 0; j < m; ++j) ssum += std::exp((g[j] - ci[j]) / eps - mx);
            out[i] = mx + std::log(ssum);
        }
    };
    auto lse_cols = [&](std::vector<double>& out) {
        for (int j = 0; j < m; ++j) out[j] = neg_inf;
        std::vector<double> acc(m, 0.0), mx(m, neg_inf);
        for (int i = 0; i < n; ++i) {
            const double* ci = cost.data() + size_t(i) * m;
            for (int j = 0; j < m; ++j) mx[j] = std::max(mx[j], (f[i] - ci[j]) / eps);
        }
        for (int i = 0; i < n; ++i) {
            const double* ci = cost.data() + size_t(i) * m;
            for (int j = 0; j < m; ++j) acc[j] += std::exp((f[i] - ci[j]) / eps - mx[j]);
        }
        for (int j = 0; j < m; ++j) out[j] = mx[j] + std::log(acc[j]);
    };

    OtResult res;
    std::vector<double> tmp_n(n), tmp_m(m);
    int it = 0;
    double err = 1.0;
    for (; it < max_iter; ++it) {
        lse_rows(tmp_n);
        for (int i = 0; i < n; ++i) f[i] = a[i] > 0 ? eps * (la[i] - tmp_n[i]) : 0.0;
        lse_cols(tmp_m);
        for (int j = 0; j < m; ++j) g[j] = b[j] > 0 ? eps * (lb[j] - tmp_m[j]) : 0.0;
        // after the g-update columns are exact; check rows
        err = 0.0;
        for (int i = 0; i < n; ++i) {
            double ri = 0.0;
            const double* ci = cost.data() + size_t(i) * m;
            for (int j = 0; j < m; ++j) ri += std::exp((f[i] + g[j] - ci[j]) / eps);
            err = std::max(err, std::abs(ri - a[i]));
        }
        if (err < tol) {
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.converged = err < tol;
    res.marginal_error = err;
    res.plan.n = n;
    res.plan.m = m;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* ci = cost.data() + size_t(i) * m;
        for (int j = 0; j < m; ++j) {
            double w = std::exp((f[i] + g[j] - ci[j]) / eps);
            if (w > 0.0) {
                res.plan.entries.push_back({i, j, w});
                value += w * ci[j];
            }
        }
    }
    res.value = value;
    return res;
}

OtResult prox_linear_energy(const std::vector<double>& a, const std::vector<double>& cost,
                            const std::vector<double>& energy, int m, double eps) {
    const int n = int(a.size());
    if (cost.size() != size_t(n) * m || energy.size() != size_t(m))
        throw std::invalid_argument("prox_linear_energy: shape mismatch");
    OtResult res;
    res.plan.n = n;
    res.plan.m = m;
    double value = 0.0;
    for (int i = 0; i < n; ++i) {
        if (a[i] <= 0.0) continue;
        const double* ci = cost.data() + size_t(i) * m;
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) mx = std::max(mx, -(ci[j] + energy[j]) / eps);
        double z = 0.0;
        for (int j = 0; j < m; ++j) z += std::exp(-(ci[j] + energy[j]) / eps - mx);
        double scale = a[i] / z;
        for (int j = 0; j < m; ++j) {
            double w = scale * std::exp(-(ci[j] + energy[j]) / eps - mx);
            if (w > 1e-300) {
                res.plan.entries.push_back({i, j, w});
                value += w * ci[j];
            }
        }
    }
    res.value = value;
    return res;
}

namespace {

std::vector<double> sq_euclid_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    std::vector<double> c(mu.size() * nu.size());
    for (size_t i = 0; i < mu.size(); ++i)
        for (size_t j = 0; j < nu.size(); ++j) {
            double dx = mu.support[i].x - nu.support[j].x;
            double dv = mu.support[i].v - nu.support[j].v;
            c[i * nu.size() + j] = dx * dx + dv * dv;
        }
    return c;
}

}  // namespace

std::pair<double, TransportPlan> w2_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    mu.validate();
    nu.validate();
    auto cost = sq_euclid_cost(mu, nu);
    OtResult r = exact_transport(mu.weights, nu.weights, cost);
    return {std::sqrt(std::max(r.value, 0.0)), std::move(r.plan)};
}

std::pair<double, TransportPlan> w2_entropic(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                             double eps, int max_iter) {
    mu.validate();
    nu.validate();
    auto cost = sq_euclid_cost(mu, nu);
    OtResult r = entropic_transport(mu.weights, nu.weights, cost, eps, max_iter);
    return {std::sqrt(std::max(r.value, 0.0)), std::move(r.plan)};
}

}  // namespace fkfpe
