#include "fkfpe/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fkfpe/fft.hpp"

namespace fkfpe {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

PhaseTestFunction standard_el_probe(const GridGeom& g) {
    double sx = 0.35 * g.Lx, sv = 0.3 * g.Lv;
    auto bump = [](double u, double s_) { return std::exp(-0.5 * u * u / (s_ * s_)); };
    return PhaseTestFunction{
        [=](double x, double v) { return bump(x, sx) * bump(v, sv); },
        [=](double x, double v) { return -x / (sx * sx) * bump(x, sx) * bump(v, sv); },
        [=](double x, double v) { return bump(x, sx) * -v / (sv * sv) * bump(v, sv); }};
}

}  // namespace

Trajectory run_scheme(const SchemeConfig& config, const DensityGrid& f0, const Potential& psi,
                      const RunOptions& opts) {
    config.validate();
    if (f0.geom() != config.grid)
        throw std::invalid_argument("initial density does not match the configured grid");
    if (!(config.h * psi.hessian_sup < 1.0))
        throw SchemeAbort("contraction violated: h ||D^2 Psi|| >= 1");
    double e0 = potential_energy(f0, psi);
    if (!std::isfinite(e0) || !std::isfinite(second_moment_v(f0)))
        throw SchemeAbort("initial density has non-finite moments");

    Trajectory traj;
    traj.config = config;
    traj.psi = psi;
    const int N = config.steps();
    traj.f.reserve(N + 1);
    traj.f.push_back(f0);

    KernelTable kernel;
    const bool diffuse = config.mode != SchemeMode::TransportOnly;
    if (diffuse)
        kernel = truncate_renormalize(
            build_kernel(config.s, config.h, config.grid.nv, config.grid.Lv), config.R());

    JkoOptions jopt;
    jopt.homogeneous = config.mode == SchemeMode::Homogeneous;
    PhaseTestFunction el_probe = standard_el_probe(config.grid);

    double kin_leak_total = 0.0;
    for (int n = 1; n <= N; ++n) {
        double t_begin = now_seconds();
        DiagnosticsRecord rec;
        rec.step = n;
        rec.t = n * config.h;

        DiffusionResult bar;
        if (diffuse)
            bar = opts.serial ? diffusion_step_serial(traj.f.back(), kernel)
                              : diffusion_step(traj.f.back(), kernel);
        else
            bar = DiffusionResult{traj.f.back(), 0.0};
        rec.diffusion_leak = bar.leak;

        JkoResult step = opts.serial ? jko_map_step_serial(bar.f, psi, config.h, jopt)
                                     : jko_map_step(bar.f, psi, config.h, jopt);
        rec.wh2 = step.wh2;
        rec.kinetic_leak = step.leak;
        kin_leak_total += step.leak;
        if (kin_leak_total > 1e-4)
            throw SchemeAbort("cumulative kinetic leakage exceeds 1e-4");

        rec.mass = mass(step.f);
        if (opts.step_diagnostics) {
            rec.lp_p = lp_norm_p(step.f, config.p);
            rec.m2v = second_moment_v(step.f);
            rec.m2v_bar = second_moment_v(bar.f);
            rec.epot = potential_energy(step.f, psi);
            rec.el_res = el_residual(bar.f, step, psi, config.h, el_probe);
            // coupling second moment of the deterministic map coupling
            double cm = 0.0;
            const GridGeom& g = config.grid;
            for (int j = 0; j < g.nv; ++j) {
                double col = 0.0;
                for (int i = 0; i < g.nx; ++i) col += bar.f(i, j);
                double S = implicit_velocity_map(psi, config.h, g.v(j));
                double dx = jopt.homogeneous ? 0.0 : 0.5 * config.h * (g.v(j) + S);
                double dv = S - g.v(j);
                cm += col * (dx * dx + dv * dv);
            }
            rec.coupling_moment = cm * g.cell();
            if (!std::isfinite(rec.lp_p) || !std::isfinite(rec.m2v) || !std::isfinite(rec.epot))
                throw SchemeAbort("non-finite diagnostics");
        }
        if (!std::isfinite(rec.mass)) throw SchemeAbort("non-finite diagnostics");

        if (opts.store_fbar) traj.fbar.push_back(std::move(bar.f));
        traj.f.push_back(std::move(step.f));
        rec.wallclock = now_seconds() - t_begin;
        traj.diag.push_back(rec);
    }
    return traj;
}

DensityGrid Trajectory::interpolate(double t) const {
    const double h = config.h;
    const double T = config.T;
    if (t < 0.0 || t > T + 1e-12) throw std::invalid_argument("interpolation time out of range");
    if (t >= T) return f.back();
    int n = int(std::floor(t / h + 1e-12));
    n = std::min(n, steps() - 1);
    double tau = t - n * h;
    if (tau <= 0.0) return f[n];
    if (config.mode == SchemeMode::TransportOnly) return f[n];
    return spectral_flow(f[n], tau, config.s).f;
}

AprioriReport apriori_report(const Trajectory& traj, const AprioriConstants* frozen,
                             double lp_slack) {
    const SchemeConfig& c = traj.config;
    AprioriReport rep;
    rep.min_value = traj.f.front().min_value();
    double lp0 = lp_norm_p(traj.f.front(), c.p);
    double m2_prev = second_moment_v(traj.f.front());
    double R = c.R();
    rep.shape_step = std::pow(c.h, 1.0 / c.s) + c.h * std::pow(R, 2.0 - 2.0 * c.s);
    double shape_step_alt = std::sqrt(c.h) + c.h * std::pow(R, 2.0 - 2.0 * c.s);
    double e0 = potential_energy(traj.f.front(), traj.psi);
    rep.shape_a = c.h * e0 + c.T * std::max(traj.psi.hessian_sup, 1e-300) * rep.shape_step;
    rep.shape_a_alt = c.h * e0 + c.T * std::max(traj.psi.hessian_sup, 1e-300) * shape_step_alt;
    rep.lp_ratio_max = 1.0;  // t = 0 term
    for (const auto& rec : traj.diag) {
        rep.mass_dev_max = std::max(rep.mass_dev_max, std::abs(rec.mass - 1.0));
        rep.sum_wh2 += rec.wh2;
        double excess = rec.m2v - m2_prev - 4.0 * rec.wh2;
        rep.Cb_required = std::max(rep.Cb_required, excess / rep.shape_step);
        m2_prev = rec.m2v;
        double denom = rec.wh2 + c.h * c.h * (rec.m2v_bar + rec.m2v);
        if (denom > 0.0)
            rep.Cd_required = std::max(rep.Cd_required, rec.coupling_moment / denom);
        double bound = std::exp(c.alpha * rec.t * (1.0 - c.p)) * lp0;
        rep.lp_ratio_max = std::max(rep.lp_ratio_max, rec.lp_p / bound);
    }
    for (const auto& g : traj.f) rep.min_value = std::min(rep.min_value, g.min_value());
    rep.Ca_required = rep.sum_wh2 / rep.shape_a;
    // mid-step interpolated Lp samples (diffusion only contracts, but check)
    for (int n = 0; n < traj.steps(); ++n) {
        double t = (n + 0.5) * c.h;
        double lp = lp_norm_p(traj.interpolate(t), c.p);
        double bound = std::exp(c.alpha * t * (1.0 - c.p)) * lp0;
        rep.lp_ratio_max = std::max(rep.lp_ratio_max, lp / bound);
    }
    rep.pass_c = rep.lp_ratio_max <= 1.0 + lp_slack;
    if (frozen && frozen->Ca > 0.0) {
        rep.pass_a = rep.Ca_required <= frozen->Ca;
        rep.pass_b = rep.Cb_required <= frozen->Cb;
        rep.pass_d = rep.Cd_required <= frozen->Cd;
    }
    return rep;
}

SpaceTimeTestFunction make_test_function(const GridGeom& g, double T, double s, int kx,
                                         double phase, double vc, double sc) {
    SpaceTimeTestFunction fn;
    double w = M_PI / (2.0 * T);
    fn.a = [w](double t) {
        double c = std::cos(w * t);
        return c * c * c * c;
    };
    fn.a_dot = [w](double t) {
        double c = std::cos(w * t);
        return -4.0 * w * c * c * c * std::sin(w * t);
    };
    fn.b.resize(g.nx);
    fn.b_dx.resize(g.nx);
    double kw = kx * M_PI / g.Lx;
    for (int i = 0; i < g.nx; ++i) {
        fn.b[i] = std::cos(kw * g.x(i) + phase);
        fn.b_dx[i] = -kw * std::sin(kw * g.x(i) + phase);
    }
    fn.c.resize(g.nv);
    fn.c_dv.resize(g.nv);
    for (int j = 0; j < g.nv; ++j) {
        double u = (g.v(j) - vc) / sc;
        fn.c[j] = std::exp(-0.5 * u * u);
        fn.c_dv[j] = -u / sc * fn.c[j];
    }
    // spectral fractional Laplacian of the velocity factor on a padded lattice
    const int L = 4 * g.nv;
    std::vector<double> pad(L, 0.0);
    std::copy(fn.c.begin(), fn.c.end(), pad.begin());
    std::vector<std::complex<double>> spec(L / 2 + 1);
    fft::rfft(pad.data(), spec.data(), L);
    double dxi = 2.0 * M_PI / (L * g.dv());
    for (int q = 0; q <= L / 2; ++q) spec[q] *= std::pow(q * dxi, 2.0 * s);
    fft::irfft(spec.data(), pad.data(), L);
    fn.c_frac.resize(g.nv);
    for (int j = 0; j < g.nv; ++j) fn.c_frac[j] = pad[j] / L;
    return fn;
}

std::vector<SpaceTimeTestFunction> standard_battery(const GridGeom& g, double T, double s,
                                                    int n) {
    struct Spec {
        int kx;
        double phase, vc, sc;
    };
    // low-wavenumber, wide bumps: keeps the deposit footprint of the probes
    // small against the h-scaling signal under test
    static const Spec specs[10] = {
        {1, 0.3, 0.5, 1.0},  {2, 1.1, -0.6, 1.1}, {1, 2.0, 0.0, 1.2}, {2, 0.7, 0.9, 1.0},
        {1, -0.4, -1.0, 0.9}, {1, 1.9, 0.3, 1.1},  {2, 0.2, -0.3, 1.2}, {2, 2.6, 1.0, 1.0},
        {1, -1.0, 0.7, 0.9}, {1, 0.0, -0.9, 1.0}};
    std::vector<SpaceTimeTestFunction> out;
    for (int i = 0; i < n && i < 10; ++i)
        out.push_back(make_test_function(g, T, s, specs[i].kx, specs[i].phase, specs[i].vc,
                                         specs[i].sc));
    return out;
}

namespace {

double inner_xv(const DensityGrid& f, const std::vector<double>& wx,
                const std::vector<double>& wv) {
    const GridGeom& g = f.geom();
    double acc = 0.0;
    for (int i = 0; i < g.nx; ++i) {
        const double* row = f.row(i);
        double ri = 0.0;
        for (int j = 0; j < g.nv; ++j) ri += row[j] * wv[j];
        acc += wx[i] * ri;
    }
    return acc * g.cell();
}

}  // namespace

std::vector<double> weak_residual(const Trajectory& traj,
                                  const std::vector<SpaceTimeTestFunction>& battery, int nsub) {
    const SchemeConfig& c = traj.config;
    const GridGeom& g = c.grid;
    const bool transport_only = c.mode == SchemeMode::TransportOnly;
    std::vector<double> acc(battery.size(), 0.0);
    // per-phi precomputed v-side vectors
    struct VSide {
        std::vector<double> vc;      // v * c(v)
        std::vector<double> gc;      // Psi'(v) * c'(v)
    };
    std::vector<VSide> vs(battery.size());
    Potential psi = traj.psi;
    for (size_t m = 0; m < battery.size(); ++m) {
        vs[m].vc.resize(g.nv);
        vs[m].gc.resize(g.nv);
        for (int j = 0; j < g.nv; ++j) {
            vs[m].vc[j] = g.v(j) * battery[m].c[j];
            vs[m].gc[j] = psi.grad(g.v(j)) * battery[m].c_dv[j];
        }
    }
    for (int n = 0; n < traj.steps(); ++n) {
        double tn = n * c.h;
        for (int q = 0; q < nsub; ++q) {
            double tau = (q + 0.5) * c.h / nsub;
            DensityGrid ft = transport_only ? traj.f[n] : spectral_flow(traj.f[n], tau, c.s).f;
            double t = tn + tau;
            for (size_t m = 0; m < battery.size(); ++m) {
                const auto& p = battery[m];
                double term = p.a_dot(t) * inner_xv(ft, p.b, p.c);
                term += p.a(t) * inner_xv(ft, p.b_dx, vs[m].vc);
                term -= p.a(t) * inner_xv(ft, p.b, vs[m].gc);
                if (!transport_only) term -= p.a(t) * inner_xv(ft, p.b, p.c_frac);
                acc[m] += (c.h / nsub) * term;
            }
        }
    }
    for (size_t m = 0; m < battery.size(); ++m) {
        const auto& p = battery[m];
        acc[m] += p.a(0.0) * inner_xv(traj.f.front(), p.b, p.c);
        acc[m] = std::abs(acc[m]);
    }
    return acc;
}

double weak_residual(const Trajectory& traj, const SpaceTimeTestFunction& phi, int nsub) {
    return weak_residual(traj, std::vector<SpaceTimeTestFunction>{phi}, nsub)[0];
}

double fit_order(const std::vector<double>& hs, const std::vector<double>& errors) {
    // least-squares slope of log(err) against log(h)
    size_t n = hs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        double x = std::log(hs[i]);
        double y = std::log(std::max(errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceTable convergence_study(const std::vector<SchemeConfig>& configs,
                                   const DensityGrid& f0, const Potential& psi,
                                   const std::function<DensityGrid(const SchemeConfig&)>& reference,
                                   const RunOptions& opts) {
    if (configs.size() < 2) throw std::invalid_argument("convergence study needs >= 2 levels");
    for (const auto& c : configs) {
        if (c.grid != configs.front().grid)
            throw std::invalid_argument("convergence study: mismatched grids");
        if (c.s != configs.front().s || c.T != configs.front().T ||
            c.mode != configs.front().mode)
            throw std::invalid_argument("convergence study: configs may differ only in h");
    }
    ConvergenceTable table;
    std::vector<double> hs, es;
    for (const auto& c : configs) {
        RunOptions ro = opts;
        ro.step_diagnostics = false;
        Trajectory traj = run_scheme(c, f0, psi, ro);
        DensityGrid ref = reference(c);
        if (ref.geom() != c.grid)
            throw std::invalid_argument("convergence study: reference grid mismatch");
        double err = 0.0;
        for (size_t k = 0; k < ref.values().size(); ++k)
            err += std::abs(traj.f.back().values()[k] - ref.values()[k]);
        err *= c.grid.cell();
        table.rows.push_back({c.h, err});
        hs.push_back(c.h);
        es.push_back(err);
    }
    table.fitted_order = fit_order(hs, es);
    table.monotone = true;
    for (size_t i = 0; i + 1 < es.size(); ++i)
        if (es[i + 1] >= es[i]) table.monotone = false;
    return table;
}

}  // namespace fkfpe
