#include "fkfpe/jko.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#ifdef FKFPE_HAVE_OPENMP
#include <omp.h>
#endif

namespace fkfpe {

double implicit_velocity_map(const Potential& psi, double h, double v) {
    if (!(h > 0.0)) throw std::invalid_argument("implicit_velocity_map requires h > 0");
    if (!(h * psi.hessian_sup < 1.0))
        throw std::invalid_argument("contraction violated: h ||D^2 Psi|| >= 1");
    auto g = [&](double S) { return S + h * psi.grad(S) - v; };
    // g is strictly increasing; bracket the root then polish with damped Newton
    double lo = std::min(0.0, v), hi = std::max(0.0, v);
    if (g(lo) > 0.0 || g(hi) < 0.0) {  // zero not between 0 and v (non-confining psi)
        double w = std::max(1.0, std::abs(v));
        lo = v - w;
        hi = v + w;
        while (g(lo) > 0.0) lo -= w;
        while (g(hi) < 0.0) hi += w;
    }
    double S = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double r = g(S);
        if (std::abs(r) <= 1e-12 * (1.0 + std::abs(v))) return S;
        if (r > 0.0) hi = S;
        else lo = S;
        double slope = 1.0 - h * psi.hessian_sup;  // conservative lower bound on g'
        double trial = S - 0.5 * r / std::max(slope, 0.5);  // damped Newton
        S = (trial > lo && trial < hi) ? trial : 0.5 * (lo + hi);
    }
    return S;
}

namespace {

struct ColumnMap {
    std::vector<double> S;       // mapped velocity per column
    std::vector<int> vl;         // lower deposit column
    std::vector<double> vfrac;   // weight of vl+1
    std::vector<int> kx;         // integer x-shift in cells
    std::vector<double> xfrac;   // weight of the next x cell
    std::vector<double> delta;   // physical x displacement
    double leak_mask_total = 0;  // columns clamped at the v-boundary (flag sum)
    std::vector<bool> clamped;
};

ColumnMap build_column_map(const GridGeom& g, const Potential& psi, double h, bool homogeneous) {
    ColumnMap cm;
    int nv = g.nv;
    cm.S.resize(nv);
    cm.vl.resize(nv);
    cm.vfrac.resize(nv);
    cm.kx.assign(nv, 0);
    cm.xfrac.assign(nv, 0.0);
    cm.delta.assign(nv, 0.0);
    cm.clamped.assign(nv, false);
    double dv = g.dv(), dx = g.dx();
    for (int j = 0; j < nv; ++j) {
        double v = g.v(j);
        double S = implicit_velocity_map(psi, h, v);
        cm.S[j] = S;
        double jv = (S + g.Lv) / dv - 0.5;
        int l = int(std::floor(jv));
        double th = jv - l;
        if (l < 0) {
            l = 0;
            th = 0.0;
            cm.clamped[j] = S < -g.Lv;
        } else if (l >= nv - 1) {
            l = nv - 1;
            th = 0.0;
            cm.clamped[j] = S >= g.Lv;
        }
        cm.vl[j] = l;
        cm.vfrac[j] = th;
        if (!homogeneous) {
            double delta = 0.5 * h * (v + S);
            cm.delta[j] = delta;
            double cxy = delta / dx;
            int k = int(std::floor(cxy));
            cm.kx[j] = ((k % g.nx) + g.nx) % g.nx;
            cm.xfrac[j] = cxy - std::floor(cxy);
        }
    }
    return cm;
}

void deposit_columns(const DensityGrid& fbar, const ColumnMap& cm, int j0, int j1,
                     DensityGrid& out, bool homogeneous) {
    const GridGeom& g = fbar.geom();
    int nx = g.nx, nv = g.nv;
    for (int j = j0; j < j1; ++j) {
        int l = cm.vl[j];
        double thv = cm.vfrac[j];
        double w0 = 1.0 - thv, w1 = thv;
        int l1 = std::min(l + 1, nv - 1);
        if (homogeneous) {
            for (int i = 0; i < nx; ++i) {
                double m = fbar(i, j);
                if (m == 0.0) continue;
                out(i, l) += w0 * m;
                out(i, l1) += w1 * m;
            }
            continue;
        }
        int kx = cm.kx[j];
        double thx = cm.xfrac[j];
        for (int i = 0; i < nx; ++i) {
            double m = fbar(i, j);
            if (m == 0.0) continue;
            int ia = (i + kx) % nx;
            int ib = (ia + 1) % nx;
            double ma = (1.0 - thx) * m, mb = thx * m;
            out(ia, l) += w0 * ma;
            out(ib, l) += w0 * mb;
            out(ia, l1) += w1 * ma;
            out(ib, l1) += w1 * mb;
        }
    }
}

JkoResult finish_map_result(const DensityGrid& fbar, const Potential& psi, double h,
                            const ColumnMap& cm, DensityGrid&& deposited) {
    const GridGeom& g = fbar.geom();
    JkoResult res;
    res.f = std::move(deposited);
    res.path = "map";
    double wh2 = 0.0, leak = 0.0;
    for (int j = 0; j < g.nv; ++j) {
        double col = 0.0;
        for (int i = 0; i < g.nx; ++i) col += fbar(i, j);
        double d = cm.S[j] - g.v(j);
        wh2 += col * d * d;
        if (cm.clamped[j]) leak += col;
    }
    res.wh2 = wh2 * g.cell();
    res.leak = leak * g.cell();
    res.objective = res.wh2 / (2.0 * h) + potential_energy(res.f, psi);
    return res;
}

}  // namespace

JkoResult jko_map_step_serial(const DensityGrid& fbar, const Potential& psi, double h,
                              const JkoOptions& opt) {
    const GridGeom& g = fbar.geom();
    ColumnMap cm = build_column_map(g, psi, h, opt.homogeneous);
    DensityGrid out(g);
    deposit_columns(fbar, cm, 0, g.nv, out, opt.homogeneous);
    return finish_map_result(fbar, psi, h, cm, std::move(out));
}

JkoResult jko_map_step(const DensityGrid& fbar, const Potential& psi, double h,
                       const JkoOptions& opt) {
#ifndef FKFPE_HAVE_OPENMP
    return jko_map_step_serial(fbar, psi, h, opt);
#else
    const GridGeom& g = fbar.geom();
    int nthreads = omp_get_max_threads();
    if (nthreads <= 1) return jko_map_step_serial(fbar, psi, h, opt);
    ColumnMap cm = build_column_map(g, psi, h, opt.homogeneous);
    std::vector<DensityGrid> bufs(nthreads, DensityGrid(g));
    // contiguous ascending column ranges per thread: the merged sum visits
    // sources in the same order as the serial loop, so results match bitwise
#pragma omp parallel num_threads(nthreads)
    {
        int t = omp_get_thread_num();
        int chunk = (g.nv + nthreads - 1) / nthreads;
        int j0 = std::min(t * chunk, g.nv);
        int j1 = std::min(j0 + chunk, g.nv);
        deposit_columns(fbar, cm, j0, j1, bufs[t], opt.homogeneous);
    }
    DensityGrid out(g);
    for (int t = 0; t < nthreads; ++t) {
        const auto& b = bufs[t].values();
        auto& o = out.values();
        for (size_t k = 0; k < o.size(); ++k) o[k] += b[k];
    }
    return finish_map_result(fbar, psi, h, cm, std::move(out));
#endif
}

JkoResult jko_variational_step(const DensityGrid& fbar, const Potential& psi, double h,
                               double eps) {
    const GridGeom& g = fbar.geom();
    if (!(h * psi.hessian_sup < 1.0))
        throw std::invalid_argument("contraction violated: h ||D^2 Psi|| >= 1");
    const int ncells = g.nx * g.nv;
    if (ncells > 4096)
        throw std::invalid_argument("variational step: grid exceeds the OT support cap");
    const double sqrt3 = std::sqrt(3.0);
    const double cell = g.cell();
    // source atoms: occupied cells of fbar, transformed by G_h o F_h
    std::vector<int> src_cell;
    std::vector<double> w, sxt, sv;
    double wmax = 0.0;
    for (double x : fbar.values()) wmax = std::max(wmax, x);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nv; ++j) {
            double m = fbar(i, j) * cell;
            if (m <= 1e-15 * wmax * cell) continue;
            src_cell.push_back(i * g.nv + j);
            w.push_back(m);
            sxt.push_back(sqrt3 * (2.0 * g.x(i) / h + g.v(j)));
            sv.push_back(g.v(j));
        }
    double wsum = 0.0;
    for (double x : w) wsum += x;
    for (double& x : w) x /= wsum;
    // target atoms: every grid cell, transformed by G_h
    std::vector<double> txt(ncells), tv(ncells), energy(ncells);
    for (int k = 0; k < g.nx; ++k)
        for (int l = 0; l < g.nv; ++l) {
            int idx = k * g.nv + l;
            txt[idx] = sqrt3 * (2.0 * g.x(k) / h - g.v(l));
            tv[idx] = g.v(l);
            energy[idx] = 2.0 * h * psi(g.v(l));
        }
    // transformed cost; the x-part is periodic with period sqrt3 * 4 Lx / h
    const double per = sqrt3 * 4.0 * g.Lx / h;
    const int n = int(w.size());
    std::vector<double> cost(size_t(n) * ncells);
    for (int i = 0; i < n; ++i) {
        double* ci = cost.data() + size_t(i) * ncells;
        for (int jdx = 0; jdx < ncells; ++jdx) {
            double dxt = sxt[i] - txt[jdx];
            dxt -= per * std::round(dxt / per);
            double dv = sv[i] - tv[jdx];
            ci[jdx] = dxt * dxt + dv * dv;
        }
    }
    OtResult prox = prox_linear_energy(w, cost, energy, ncells, eps);
    JkoResult res;
    res.path = "variational";
    res.f = DensityGrid(g);
    for (const auto& e : prox.plan.entries) res.f.values()[e.j] += e.w * wsum / cell;
    res.wh2 = prox.value * wsum;
    res.objective = res.wh2 / (2.0 * h) + potential_energy(res.f, psi);
    // re-index plan sources to linear cell ids
    for (auto& e : prox.plan.entries) {
        e.i = src_cell[e.i];
        e.w *= wsum;
    }
    res.plan = std::move(prox.plan);
    return res;
}

double el_residual(const DensityGrid& fbar, const JkoResult& step, const Potential& psi,
                   double h, const PhaseTestFunction& phi) {
    const GridGeom& g = fbar.geom();
    const double cell = g.cell();
    double t1 = 0.0;
    if (step.plan.has_value()) {
        for (const auto& e : step.plan->entries) {
            int si = e.i / g.nv, sj = e.i % g.nv;
            int ti = e.j / g.nv, tj = e.j % g.nv;
            double ddx = g.x(ti) - g.x(si);
            ddx -= 2.0 * g.Lx * std::round(ddx / (2.0 * g.Lx));
            double dv = g.v(tj) - g.v(sj);
            t1 += e.w * (ddx * phi.dphi_dx(g.x(ti), g.v(tj)) + dv * phi.dphi_dv(g.x(ti), g.v(tj)));
        }
        t1 /= h;
    } else {
        for (int j = 0; j < g.nv; ++j) {
            double v = g.v(j);
            double S = implicit_velocity_map(psi, h, v);
            double delta = 0.5 * h * (v + S);
            double dv = S - v;
            for (int i = 0; i < g.nx; ++i) {
                double m = fbar(i, j);
                if (m == 0.0) continue;
                double xp = g.wrap_x(g.x(i) + delta);
                t1 += m * (delta * phi.dphi_dx(xp, S) + dv * phi.dphi_dv(xp, S));
            }
        }
        t1 *= cell / h;
    }
    double t2 = 0.0, t3 = 0.0, rem = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        double x = g.x(i);
        for (int j = 0; j < g.nv; ++j) {
            double m = step.f(i, j);
            if (m == 0.0) continue;
            double v = g.v(j);
            t2 -= m * v * phi.dphi_dx(x, v);
            t3 += m * psi.grad(v) * phi.dphi_dv(x, v);
            rem += m * psi.grad(v) * phi.dphi_dx(x, v);
        }
    }
    t2 *= cell;
    t3 *= cell;
    rem *= 0.5 * h * cell;
    return std::abs(t1 + t2 + t3 - rem);
}

}  // namespace fkfpe
