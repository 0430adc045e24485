#include "fkfpe/validate.hpp"

#include <cmath>

#include "fkfpe/accel.hpp"
#include "fkfpe/jko.hpp"
#include "fkfpe/kernel.hpp"
#include "fkfpe/ot.hpp"
#include "fkfpe/reference.hpp"
#include "fkfpe/rng.hpp"
#include "fkfpe/scheme.hpp"

namespace fkfpe {

namespace {

void push(std::vector<CheckResult>& out, const std::string& name, double value,
          double threshold) {
    out.push_back({name, value <= threshold, value, threshold});
}

std::vector<CheckResult> suite_kernel() {
    std::vector<CheckResult> out;
    const int nv = 1024;
    const double Lv = 16.0;
    {
        KernelTable k = build_kernel(1.0, 0.125, nv, Lv);
        double sup = 0.0;
        for (int m = 0; m < 2 * nv; ++m) {
            double w = k.offset(m);
            double ref = std::exp(-w * w / 0.5) / std::sqrt(4.0 * M_PI * 0.125);
            sup = std::max(sup, std::abs(k.vals[m] - ref));
        }
        push(out, "gaussian closed form (s=1)", sup, 1e-6);
    }
    {
        KernelTable k = build_kernel(0.5, 0.125, 2048, 32.0);
        double sup = 0.0;
        for (int m = 0; m < 2 * 2048; ++m) {
            double w = k.offset(m);
            double ref = (0.125 / M_PI) / (0.125 * 0.125 + w * w);
            sup = std::max(sup, std::abs(k.vals[m] - ref));
        }
        push(out, "cauchy closed form (s=1/2)", sup, 1e-4);
    }
    for (double s : {0.5, 0.75, 1.0}) {
        KernelTable k = build_kernel(s, 0.1, nv, Lv);
        push(out, "discrete L1 = 1 (s=" + std::to_string(s) + ")", std::abs(k.l1 - 1.0), 1e-3);
    }
    {
        double r = moment_ratio(0.5, 1.0, 1.0, 2048, 32.0);
        double ref = (2.0 / M_PI) * (1.0 - M_PI / 4.0) / 0.5;
        push(out, "cauchy ball moment ratio", std::abs(r - ref), 1e-2);
    }
    {
        GridGeom g(4, 256, 1.0, 8.0);
        DensityGrid f = gaussian_density(g, 0.0, 0.0, 0.4, 0.4);
        KernelTable k = renormalize(build_kernel(1.0, 0.125, g.nv, g.Lv));
        DiffusionResult r = diffusion_step_serial(f, k);
        push(out, "diffusion mass preserved", std::abs(mass(r.f) - mass(f)) + r.leak, 1e-10);
        push(out, "diffusion L2 contraction", lp_norm_p(r.f, 2.0) - lp_norm_p(f, 2.0), 0.0);
    }
    return out;
}

std::vector<CheckResult> suite_cost() {
    std::vector<CheckResult> out;
    Rng rng(31);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        double h = 0.5 + 1.5 * rng.uniform();
        PhasePoint a{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        PhasePoint b{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        double c = cost_ch(h, a, b);
        double o = cubic_oracle(h, a, b);
        worst = std::max(worst, std::abs(c - o) / (1.0 + std::abs(c)));
    }
    push(out, "cost vs cubic-acceleration oracle (100 draws)", worst, 1e-9);
    {
        PhasePoint p{0.7, -0.3};
        PhasePoint ft = map_Fh(0.5, p);
        push(out, "free transport has zero cost", cost_ch(0.5, p, ft), 1e-14);
    }
    {
        DiscreteMeasure mu, nu;
        Rng r2(77);
        for (int i = 0; i < 6; ++i) {
            mu.support.push_back({2 * r2.uniform() - 1, 2 * r2.uniform() - 1});
            nu.support.push_back({2 * r2.uniform() - 1, 2 * r2.uniform() - 1});
            mu.weights.push_back(1.0 / 6);
            nu.weights.push_back(1.0 / 6);
        }
        auto [w1, p1] = wh(0.8, mu, nu);
        auto [w2v, p2] = wh_direct_lp(0.8, mu, nu);
        push(out, "W_h reduction equals direct LP", std::abs(w1 * w1 - w2v * w2v), 1e-8);
        auto ft = pushforward(mu, map_Fh, 0.8);
        auto [wz, pz] = wh(0.8, mu, ft);
        push(out, "W_h(mu, Fh# mu) = 0", wz, 1e-10);
    }
    return out;
}

std::vector<CheckResult> suite_jko() {
    std::vector<CheckResult> out;
    Potential psi = quadratic_potential();
    {
        double S = implicit_velocity_map(psi, 0.5, 3.0);
        push(out, "implicit map linear case", std::abs(S - 2.0), 1e-12);
    }
    {
        GridGeom g(16, 16, 0.12, 0.48);
        DensityGrid fb = gaussian_density(g, 0.0, 0.25, 0.04, 0.08);
        double h = 2.0 * g.dx() / g.dv();
        JkoResult m = jko_map_step_serial(fb, psi, h);
        JkoResult v = jko_variational_step(fb, psi, h, 2e-4);
        push(out, "map vs variational objective gap", std::abs(m.objective - v.objective), 1e-3);
        push(out, "variational step mass", std::abs(mass(v.f) - 1.0), 1e-9);
    }
    {
        GridGeom g(32, 64, 2.0, 4.0);
        DensityGrid fb = gaussian_density(g, 0.0, 1.0, 0.3, 0.3);
        JkoResult m = jko_map_step_serial(fb, psi, 0.25);
        push(out, "kinetic step mass", std::abs(mass(m.f) - 1.0), 1e-10);
        push(out, "potential energy decrease",
             potential_energy(m.f, psi) - potential_energy(fb, psi), 0.0);
    }
    return out;
}

std::vector<CheckResult> suite_scheme() {
    std::vector<CheckResult> out;
    SchemeConfig c;
    c.s = 1.0;
    c.h = 0.125;
    c.T = 1.0;
    c.grid = GridGeom(64, 256, 2.0, 8.0);
    c.alpha = 1.05;
    c.p = 2.0;
    Potential psi = quadratic_potential();
    DensityGrid f0 = gaussian_density(c.grid, 0.0, 0.0, 0.35, 0.3);
    Trajectory traj = run_scheme(c, f0, psi);
    AprioriReport rep = apriori_report(traj);
    push(out, "mass conservation along the run", rep.mass_dev_max, 1e-9);
    push(out, "nonnegativity along the run", -rep.min_value, 0.0);
    push(out, "Lp decay bound", rep.lp_ratio_max, 1.01);
    auto battery = standard_battery(c.grid, c.T, c.s, 2);
    auto res = weak_residual(traj, battery);
    double total = 0.0;
    for (double r : res) total += r;
    push(out, "weak residual magnitude at h=1/8", total, 0.2);
    return out;
}

std::vector<CheckResult> suite_oracle() {
    std::vector<CheckResult> out;
    {
        StationaryLaw law = stationary_stable(1.0, 512, 12.0);
        double sup = 0.0;
        GridGeom g(1, 512, 1.0, 12.0);
        for (int j = 0; j < 512; ++j) {
            double v = g.v(j);
            sup = std::max(sup,
                           std::abs(law.density[j] - std::exp(-0.5 * v * v) / std::sqrt(2.0 * M_PI)));
        }
        push(out, "stationary law s=1 is standard normal", sup, 1e-4);
    }
    {
        SchemeConfig c;
        c.s = 1.0;
        c.h = 1.0 / 16;
        c.T = 1.0;
        c.grid = GridGeom(1, 512, 1.0, 12.0);
        c.alpha = 1.05;
        c.mode = SchemeMode::Homogeneous;
        c.seed = 5;
        Potential psi = quadratic_potential();
        auto sampler = [](Rng& rng, double& x, double& v) {
            double u1 = rng.uniform(), u2 = rng.uniform();
            v = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2) * 0.5;
            x = 0.0;
        };
        ParticleEnsemble pe = sde_simulate(c, sampler, psi, 20000);
        DensityGrid f0 = gaussian_density(c.grid, 0.0, 0.0, 1.0, 0.5);
        Trajectory traj = run_scheme(c, f0, psi);
        push(out, "SDE vs grid KS distance (s=1)", ks_distance_v(pe, traj.f.back()), 0.05);
    }
    return out;
}

}  // namespace

bool known_suite(const std::string& suite) {
    return suite == "kernel" || suite == "cost" || suite == "jko" || suite == "scheme" ||
           suite == "oracle";
}

std::vector<CheckResult> run_validation_suite(const std::string& suite) {
    if (suite == "kernel") return suite_kernel();
    if (suite == "cost") return suite_cost();
    if (suite == "jko") return suite_jko();
    if (suite == "scheme") return suite_scheme();
    if (suite == "oracle") return suite_oracle();
    return {};
}

}  // namespace fkfpe
