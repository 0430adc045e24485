#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fkfpe/config.hpp"
#include "fkfpe/io.hpp"
#include "fkfpe/kernel.hpp"
#include "fkfpe/parallel.hpp"
#include "fkfpe/reference.hpp"
#include "fkfpe/scheme.hpp"
#include "fkfpe/validate.hpp"

namespace fs = std::filesystem;
using namespace fkfpe;

namespace {

constexpr int kExitCheckFailed = 2;
constexpr int kExitAbort = 3;
constexpr int kExitUsage = 64;

std::string file_header(const SchemeConfig& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s config=%016llx seed=%llu", kToolVersion,
                  (unsigned long long)config_hash(c), (unsigned long long)c.seed);
    return buf;
}

std::string resolve_out_dir(const std::string& flag_value) {
    if (const char* env = std::getenv("FKFPE_OUT"); env && *env) return env;
    return flag_value;
}

void write_manifest(const fs::path& dir, const std::string& config_path, const SchemeConfig& c,
                    const std::string& checks) {
    std::ofstream out(dir / "manifest.txt");
    out << "tool=" << kToolVersion << "\n";
    out << "config_path=" << config_path << "\n";
    out << "config_hash=" << std::hex << config_hash(c) << std::dec << "\n";
    out << "seed=" << c.seed << "\n";
    out << "checks=" << checks << "\n";
    out << "out_dir=" << fs::absolute(dir).string() << "\n";
    out << "# resolved configuration\n";
    out << render_config(c);
}

int cmd_run(const std::string& config_path, std::string out_dir, int threads,
            long long seed_override, const std::string& checks) {
    SchemeConfig c = load_config(config_path);
    if (seed_override >= 0) c.seed = uint64_t(seed_override);
    c.validate();
    set_threads(threads);
    out_dir = resolve_out_dir(out_dir);
    fs::create_directories(out_dir);
    fs::path dir(out_dir);
    write_manifest(dir, config_path, c, checks);

    Potential psi = c.make_psi();
    DensityGrid f0 = gaussian_density(c.grid, c.f0_x0, c.f0_v0, c.f0_sx, c.f0_sv);
    RunOptions opts;
    opts.serial = threads == 1;
    Trajectory traj = run_scheme(c, f0, psi, opts);

    {
        std::ofstream out(dir / "diagnostics.csv");
        out << "# " << file_header(c) << "\n";
        out << "n,t,mass,lp_p,m2v,epot,wh2,el_res\n";
        char buf[256];
        for (const auto& r : traj.diag) {
            std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                          r.step, r.t, r.mass, r.lp_p, r.m2v, r.epot, r.wh2, r.el_res);
            out << buf;
        }
    }
    save_density(traj.f.back(), (dir / "final.fkfp").string());
    save_density_csv(traj.f.back(), (dir / "final.csv").string(), file_header(c));
    {
        std::ofstream mx(dir / "marginal_x.dat"), mv(dir / "marginal_v.dat");
        mx << "# " << file_header(c) << "\n# x  density\n";
        mv << "# " << file_header(c) << "\n# v  density\n";
        const GridGeom& g = c.grid;
        const DensityGrid& fN = traj.f.back();
        std::vector<double> xm(g.nx, 0.0);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.nv; ++j) xm[i] += fN(i, j);
        for (int i = 0; i < g.nx; ++i) mx << g.x(i) << "  " << xm[i] * g.dv() << "\n";
        auto vm = v_marginal(fN);
        for (int j = 0; j < g.nv; ++j) mv << g.v(j) << "  " << vm[j] << "\n";
    }

    bool ok = true;
    AprioriReport rep = apriori_report(traj);
    auto want = [&](const char* name) { return checks.find(name) != std::string::npos; };
    if (want("mass")) {
        bool pass = rep.mass_dev_max <= 1e-9;
        std::printf("check mass        : %s (max deviation %.3e)\n", pass ? "pass" : "FAIL",
                    rep.mass_dev_max);
        ok = ok && pass;
    }
    if (want("nonneg")) {
        bool pass = rep.min_value >= 0.0;
        std::printf("check nonneg      : %s (min value %.3e)\n", pass ? "pass" : "FAIL",
                    rep.min_value);
        ok = ok && pass;
    }
    if (want("lp")) {
        bool pass = rep.lp_ratio_max <= 1.01;
        std::printf("check lp-bound    : %s (worst ratio %.4f)\n", pass ? "pass" : "FAIL",
                    rep.lp_ratio_max);
        ok = ok && pass;
    }
    std::printf("run complete: %d steps, outputs in %s\n", traj.steps(), out_dir.c_str());
    return ok ? 0 : kExitCheckFailed;
}

int cmd_validate(const std::string& suite) {
    if (!known_suite(suite)) {
        std::fprintf(stderr, "unknown suite: %s (expected kernel|cost|jko|scheme|oracle)\n",
                     suite.c_str());
        return kExitUsage;
    }
    auto results = run_validation_suite(suite);
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%-46s %s  (value %.3e vs %.3e)\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                    r.value, r.threshold);
        ok = ok && r.pass;
    }
    return ok ? 0 : kExitCheckFailed;
}

int cmd_convergence(const std::string& config_path, std::string out_dir, int levels,
                    int threads) {
    if (levels < 3) {
        std::fprintf(stderr, "convergence study needs at least 3 levels\n");
        return kExitUsage;
    }
    SchemeConfig base = load_config(config_path);
    base.validate();
    set_threads(threads);
    out_dir = resolve_out_dir(out_dir);
    fs::create_directories(out_dir);

    Potential psi = base.make_psi();
    DensityGrid f0 = gaussian_density(base.grid, base.f0_x0, base.f0_v0, base.f0_sx, base.f0_sv);
    std::vector<SchemeConfig> configs;
    for (int l = 0; l < levels; ++l) {
        SchemeConfig c = base;
        c.h = base.h / double(1 << l);
        configs.push_back(c);
    }
    auto reference = [&](const SchemeConfig& c) {
        if (c.mode == SchemeMode::TransportOnly) {
            auto f0fun = [&](double x, double v) {
                double ex = std::exp(-0.5 * std::pow((x - c.f0_x0) / c.f0_sx, 2));
                return ex * std::exp(-0.5 * std::pow((v - c.f0_v0) / c.f0_sv, 2));
            };
            DensityGrid ref = characteristics_exact_density(c.grid, psi, c.T, f0fun);
            ref.normalize();
            return ref;
        }
        return reference_pde_solve(c, f0, psi);
    };
    ConvergenceTable table = convergence_study(configs, f0, psi, reference);
    std::ofstream csv(fs::path(out_dir) / "convergence.csv");
    csv << "# " << file_header(base) << "\nh,l1_error\n";
    std::printf("      h        L1 error\n");
    for (const auto& row : table.rows) {
        std::printf("  %.6f   %.6e\n", row.h, row.error_l1);
        csv << row.h << "," << row.error_l1 << "\n";
    }
    std::printf("fitted order: %.3f   monotone: %s\n", table.fitted_order,
                table.monotone ? "yes" : "no");
    csv << "# fitted_order=" << table.fitted_order << " monotone=" << table.monotone << "\n";
    return 0;
}

int cmd_kernel_table(double s, double t, int nv, double Lv, double R,
                     const std::string& out_file, const std::string& cache_dir) {
    KernelTable k = build_kernel(s, t, nv, Lv);
    if (R > 0.0) k = truncate_renormalize(k, R);
    if (!cache_dir.empty()) {
        fs::create_directories(cache_dir);
        char name[128];
        std::snprintf(name, sizeof name, "kernel_s%g_t%g_n%d_L%g.fkfp", s, t, nv, Lv);
        // the offset lattice is a 1 x 2nv grid spanning [-2Lv, 2Lv)
        DensityGrid cacheg{GridGeom(1, 2 * nv, 1.0, 2.0 * Lv)};
        cacheg.values() = k.vals;
        save_density(cacheg, (fs::path(cache_dir) / name).string());
    }
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_file.empty()) {
        file.open(out_file);
        os = &file;
    }
    *os << "# " << kToolVersion << " kernel s=" << s << " t=" << t << " N_v=" << nv
        << " L_v=" << Lv << " R=" << (R > 0 ? R : 0.0) << " l1=" << k.l1 << "\n";
    *os << "v,phi\n";
    for (int m = 0; m < 2 * nv; ++m) *os << k.offset(m) << "," << k.vals[m] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"operator-splitting solver for the fractional kinetic Fokker-Planck equation"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", checks = "mass,nonneg,lp", suite, kt_out, cache_dir;
    int threads = 0, levels = 3;
    long long seed = -1;
    double kt_s = 1.0, kt_t = 0.125, kt_Lv = 8.0, kt_R = 0.0;
    int kt_nv = 256;

    auto* run = app.add_subcommand("run", "run a configured scheme");
    run->add_option("--config", config_path)->required();
    run->add_option("--out", out_dir);
    run->add_option("--threads", threads);
    run->add_option("--seed", seed);
    run->add_option("--checks", checks);

    auto* val = app.add_subcommand("validate", "run a named validation suite");
    val->add_option("suite", suite)->required();

    auto* conv = app.add_subcommand("convergence", "h-halving study against the reference");
    conv->add_option("--config", config_path)->required();
    conv->add_option("--out", out_dir);
    conv->add_option("--levels", levels);
    conv->add_option("--threads", threads);

    auto* kt = app.add_subcommand("kernel-table", "emit kernel samples as CSV");
    kt->add_option("--s", kt_s);
    kt->add_option("--t", kt_t);
    kt->add_option("--N_v", kt_nv);
    kt->add_option("--L_v", kt_Lv);
    kt->add_option("--R", kt_R);
    kt->add_option("--out", kt_out);
    kt->add_option("--cache-dir", cache_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, threads, seed, checks);
        if (val->parsed()) return cmd_validate(suite);
        if (conv->parsed()) return cmd_convergence(config_path, out_dir, levels, threads);
        if (kt->parsed()) return cmd_kernel_table(kt_s, kt_t, kt_nv, kt_Lv, kt_R, kt_out, cache_dir);
    } catch (const ConfigError& e) {
        if (e.line > 0)
            std::fprintf(stderr, "config error at line %d: %s\n", e.line, e.message.c_str());
        else
            std::fprintf(stderr, "config error: %s\n", e.message.c_str());
        return kExitUsage;
    } catch (const SchemeAbort& e) {
        std::fprintf(stderr, "abort: %s\n", e.what());
        return kExitAbort;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitAbort;
    }
    return 0;
}
