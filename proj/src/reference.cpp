#include "fkfpe/reference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fkfpe/fft.hpp"
#include "fkfpe/jko.hpp"
#include "fkfpe/kernel.hpp"
#include "fkfpe/rng.hpp"

#ifdef FKFPE_HAVE_OPENMP
#include <omp.h>
#endif

namespace fkfpe {

namespace {

// ---------------------------------------------------------------------------
// method-of-lines right-hand side
//
// df/dt = -v df/dx + d/dv(Psi'(v) f) - (-Lap_v)^s f
// centered differences for the first two terms; the fractional term uses the
// circular spectral multiplier on the v-window (mass-conserving).
// ---------------------------------------------------------------------------
struct MolWorkspace {
    const GridGeom& g;
    std::vector<double> gv;                       // Psi'(v_j)
    std::vector<double> mult;                     // |xi_q|^{2s}
    std::vector<double> pad;
    std::vector<std::complex<double>> spec;
    bool use_frac;

    MolWorkspace(const GridGeom& g_, const Potential& psi, double s, bool frac)
        : g(g_), gv(g_.nv), pad(g_.nv), spec(g_.nv / 2 + 1), use_frac(frac) {
        for (int j = 0; j < g.nv; ++j) gv[j] = psi.grad(g.v(j));
        mult.resize(g.nv / 2 + 1);
        double dxi = 2.0 * M_PI / (g.nv * g.dv());
        for (int q = 0; q <= g.nv / 2; ++q) mult[q] = std::pow(q * dxi, 2.0 * s);
    }

    double max_frac_mult() const { return use_frac ? mult.back() : 0.0; }

    void rhs(const DensityGrid& f, DensityGrid& out) {
        const int nx = g.nx, nv = g.nv;
        const double i2dx = 1.0 / (2.0 * g.dx()), i2dv = 1.0 / (2.0 * g.dv());
        for (int i = 0; i < nx; ++i) {
            const double* up = f.row((i + 1) % nx);
            const double* dn = f.row((i - 1 + nx) % nx);
            const double* fr = f.row(i);
            double* o = out.row(i);
            if (nx > 1)
                for (int j = 0; j < nv; ++j) o[j] = -g.v(j) * (up[j] - dn[j]) * i2dx;
            else
                for (int j = 0; j < nv; ++j) o[j] = 0.0;
            // drift: d/dv (gv f), zero beyond the window
            for (int j = 0; j < nv; ++j) {
                double hi = j + 1 < nv ? gv[j + 1] * fr[j + 1] : 0.0;
                double lo = j > 0 ? gv[j - 1] * fr[j - 1] : 0.0;
                o[j] += (hi - lo) * i2dv;
            }
            if (use_frac) {
                fft::rfft(fr, spec.data(), nv);
                for (int q = 0; q <= nv / 2; ++q) spec[q] *= mult[q];
                fft::irfft(spec.data(), pad.data(), nv);
                double inv = 1.0 / nv;
                for (int j = 0; j < nv; ++j) o[j] -= pad[j] * inv;
            }
        }
    }
};

DensityGrid mol_solve(const SchemeConfig& config, const DensityGrid& f0, const Potential& psi,
                      bool use_frac) {
    const GridGeom& g = config.grid;
    if (f0.geom() != g) throw std::invalid_argument("reference: grid mismatch");
    MolWorkspace ws(g, psi, config.s, use_frac);
    double vmax = std::max(std::abs(g.v(0)), std::abs(g.v(g.nv - 1)));
    double gmax = 1e-30;
    for (int j = 0; j < g.nv; ++j) gmax = std::max(gmax, std::abs(ws.gv[j]));
    double dt = 0.4 * g.dx() / std::max(vmax, 1e-30);
    dt = std::min(dt, 0.4 * g.dv() / gmax);
    if (use_frac) dt = std::min(dt, 2.5 / std::max(ws.max_frac_mult(), 1e-30));
    if (g.nx == 1) dt = std::min(0.4 * g.dv() / gmax,
                                 use_frac ? 2.5 / std::max(ws.max_frac_mult(), 1e-30) : 1.0);
    int nsteps = int(std::ceil(config.T / dt));
    dt = config.T / nsteps;

    DensityGrid f = f0;
    DensityGrid k1(g), k2(g), k3(g), k4(g), tmp(g);
    auto axpy = [&](DensityGrid& y, const DensityGrid& x, const DensityGrid& d, double a) {
        const auto& xv = x.values();
        const auto& dv = d.values();
        auto& yv = y.values();
        for (size_t m = 0; m < yv.size(); ++m) yv[m] = xv[m] + a * dv[m];
    };
    for (int n = 0; n < nsteps; ++n) {
        ws.rhs(f, k1);
        axpy(tmp, f, k1, 0.5 * dt);
        ws.rhs(tmp, k2);
        axpy(tmp, f, k2, 0.5 * dt);
        ws.rhs(tmp, k3);
        axpy(tmp, f, k3, dt);
        ws.rhs(tmp, k4);
        auto& fv = f.values();
        const auto& a1 = k1.values();
        const auto& a2 = k2.values();
        const auto& a3 = k3.values();
        const auto& a4 = k4.values();
        for (size_t m = 0; m < fv.size(); ++m)
            fv[m] += dt / 6.0 * (a1[m] + 2.0 * a2[m] + 2.0 * a3[m] + a4[m]);
    }
    return f;
}

}  // namespace

DensityGrid reference_pde_solve(const SchemeConfig& config, const DensityGrid& f0,
                                const Potential& psi) {
    return mol_solve(config, f0, psi, true);
}

DensityGrid reference_pde_solve_transport(const SchemeConfig& config, const DensityGrid& f0,
                                          const Potential& psi) {
    return mol_solve(config, f0, psi, false);
}

// ---------------------------------------------------------------------------
// stochastic reference
// ---------------------------------------------------------------------------

namespace {

void advance_particles(const SchemeConfig& config,
                       const std::function<void(Rng&, double&, double&)>& sample_f0,
                       const Potential& psi, size_t i0, size_t i1, double* xs, double* vs) {
    const int N = config.steps();
    const double h = config.h;
    const double R = config.R();
    const bool diffuse = config.mode != SchemeMode::TransportOnly;
    const bool homogeneous = config.mode == SchemeMode::Homogeneous;
    for (size_t i = i0; i < i1; ++i) {
        Rng rng(config.seed, i);
        double x, v;
        sample_f0(rng, x, v);
        for (int n = 0; n < N; ++n) {
            if (diffuse) v += sample_stable_increment(rng, config.s, h, R);
            double vn = implicit_velocity_map(psi, h, v);
            if (!homogeneous) x += 0.5 * h * (v + vn);
            v = vn;
        }
        xs[i] = x;
        vs[i] = v;
    }
}

}  // namespace

ParticleEnsemble sde_simulate_serial(const SchemeConfig& config,
                                     const std::function<void(Rng&, double&, double&)>& sample_f0,
                                     const Potential& psi, size_t particles) {
    ParticleEnsemble out;
    out.dim = 1;
    out.x.resize(particles);
    out.v.resize(particles);
    advance_particles(config, sample_f0, psi, 0, particles, out.x.data(), out.v.data());
    return out;
}

ParticleEnsemble sde_simulate(const SchemeConfig& config,
                              const std::function<void(Rng&, double&, double&)>& sample_f0,
                              const Potential& psi, size_t particles) {
#ifndef FKFPE_HAVE_OPENMP
    return sde_simulate_serial(config, sample_f0, psi, particles);
#else
    ParticleEnsemble out;
    out.dim = 1;
    out.x.resize(particles);
    out.v.resize(particles);
    // per-particle streams: the partition cannot change the draw sequence
#pragma omp parallel
    {
        int t = omp_get_thread_num(), nt = omp_get_num_threads();
        size_t chunk = (particles + nt - 1) / nt;
        size_t i0 = std::min(size_t(t) * chunk, particles);
        size_t i1 = std::min(i0 + chunk, particles);
        advance_particles(config, sample_f0, psi, i0, i1, out.x.data(), out.v.data());
    }
    return out;
#endif
}

ParticleEnsemble characteristics_transport(const ParticleEnsemble& f0, const Potential& psi,
                                           double T) {
    ParticleEnsemble out = f0;
    const int d = out.dim;
    const size_t M = out.size();
    int nsteps = std::max(1, int(std::ceil(T * 512.0)));
    double dt = T / nsteps;
    // vdot = -grad Psi applied per component; xdot = v
    for (size_t i = 0; i < M; ++i) {
        for (int c = 0; c < d; ++c) {
            double x = out.x[i * d + c], v = out.v[i * d + c];
            for (int n = 0; n < nsteps; ++n) {
                auto fv = [&](double vv) { return -psi.grad(vv); };
                double k1v = fv(v), k1x = v;
                double k2v = fv(v + 0.5 * dt * k1v), k2x = v + 0.5 * dt * k1v;
                double k3v = fv(v + 0.5 * dt * k2v), k3x = v + 0.5 * dt * k2v;
                double k4v = fv(v + dt * k3v), k4x = v + dt * k3v;
                x += dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
                v += dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            }
            out.x[i * d + c] = x;
            out.v[i * d + c] = v;
        }
    }
    return out;
}

DensityGrid characteristics_exact_density(const GridGeom& g, const Potential& psi, double T,
                                          const std::function<double(double, double)>& f0) {
    if (psi.name != "quadratic" && psi.name != "zero")
        throw std::invalid_argument("closed-form characteristics need a quadratic or zero potential");
    double k = psi.hessian_sup;  // Psi = k v^2 / 2
    DensityGrid out(g);
    double ekT = std::exp(k * T);
    double drift = k > 0.0 ? (ekT - 1.0) / k : T;  // integral of e^{k t} dt
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.nv; ++j) {
            double v0 = g.v(j) * ekT;
            double x0 = g.wrap_x(g.x(i) - g.v(j) * drift);
            out(i, j) = ekT * f0(x0, v0);
        }
    return out;
}

StationaryLaw stationary_stable(double s, int nv, double Lv) {
    if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("s must lie in (0, 1]");
    StationaryLaw law;
    law.s = s;
    law.nv = nv;
    law.Lv = Lv;
    law.density = sample_multiplier_on_centers(
        [s](double xi) { return std::exp(-std::pow(xi, 2.0 * s) / (2.0 * s)); }, nv, Lv);
    double m = 0.0;
    for (double x : law.density) m += x;
    m *= 2.0 * Lv / nv;
    for (double& x : law.density) x /= m;
    return law;
}

double ks_distance_v(const ParticleEnsemble& particles, const DensityGrid& f) {
    if (particles.dim != 1) throw std::invalid_argument("ks_distance_v expects dim = 1");
    const GridGeom& g = f.geom();
    std::vector<double> vm = v_marginal(f);
    double total = 0.0;
    for (double x : vm) total += x * g.dv();
    std::vector<double> pv = particles.v;
    std::sort(pv.begin(), pv.end());
    double ks = 0.0, cdf = 0.0;
    const double M = double(pv.size());
    for (int j = 0; j <= g.nv; ++j) {
        double edge = -g.Lv + j * g.dv();
        if (j > 0) cdf += vm[j - 1] * g.dv();
        double femp = double(std::lower_bound(pv.begin(), pv.end(), edge) - pv.begin()) / M;
        ks = std::max(ks, std::abs(femp - cdf / total));
    }
    return ks;
}

}  // namespace fkfpe
