// Timing comparison of the OpenMP kernels against their serial reference
// implementations: diffusion convolution, kinetic deposit, SDE advance.
#include <chrono>
#include <cstdio>
#include <functional>

#include "fkfpe/grid.hpp"
#include "fkfpe/jko.hpp"
#include "fkfpe/kernel.hpp"
#include "fkfpe/parallel.hpp"
#include "fkfpe/reference.hpp"
#include "fkfpe/rng.hpp"

using namespace fkfpe;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    using clock = std::chrono::steady_clock;
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = clock::now();
        fn();
        auto t1 = clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %.2fx\n", name,
                serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());

    GridGeom g(128, 1024, 2.0, 16.0);
    DensityGrid f = gaussian_density(g, -0.5, 0.3, 0.4, 0.4);
    Potential psi = quadratic_potential();
    double h = 1.0 / 16;
    KernelTable k = truncate_renormalize(build_kernel(1.0, h, g.nv, g.Lv), 1.0 / std::sqrt(h));

    report("diffusion_step",
           time_best_of(5, [&] { diffusion_step_serial(f, k); }),
           time_best_of(5, [&] { diffusion_step(f, k); }));

    report("spectral_flow",
           time_best_of(5, [&] { spectral_flow_serial(f, 0.01, 0.75); }),
           time_best_of(5, [&] { spectral_flow(f, 0.01, 0.75); }));

    report("jko_map_step",
           time_best_of(5, [&] { jko_map_step_serial(f, psi, h); }),
           time_best_of(5, [&] { jko_map_step(f, psi, h); }));

    SchemeConfig c;
    c.s = 0.75;
    c.h = h;
    c.T = 0.5;
    c.alpha = 1.05;
    c.grid = g;
    c.seed = 9;
    auto sampler = [](Rng& rng, double& x, double& v) {
        x = rng.uniform() - 0.5;
        v = rng.uniform() - 0.5;
    };
    report("sde_simulate (5e4)",
           time_best_of(3, [&] { sde_simulate_serial(c, sampler, psi, 50000); }),
           time_best_of(3, [&] { sde_simulate(c, sampler, psi, 50000); }));
    return 0;
}
