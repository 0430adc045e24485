#include "fkfpe/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fkfpe/fft.hpp"

namespace fkfpe {

namespace {

constexpr int kFine = 4;  // build-lattice refinement
constexpr int kWide = 2;  // build-window widening before the fold

/// Overlap fraction of the offset cell [odv - dv/2, odv + dv/2] with [-R, R].
double ball_weight(double off, double dv, double R) {
    double lo = std::max(off - 0.5 * dv, -R);
    double hi = std::min(off + 0.5 * dv, R);
    return std::clamp((hi - lo) / dv, 0.0, 1.0);
}

std::vector<double> spectral_build(const std::function<double(double)>& mult, int nv,
                                   double Lv, int sub_offset) {
    const int M = 2 * nv * kFine * kWide;
    const double dv = 2.0 * Lv / nv;
    const double P = M * (dv / kFine);
    std::vector<std::complex<double>> spec(M / 2 + 1);
    for (int k = 0; k <= M / 2; ++k) spec[k] = mult(2.0 * M_PI * k / P);
    std::vector<double> full(M);
    fft::irfft(spec.data(), full.data(), M);
    for (double& x : full) x /= P;
    std::vector<double> out(2 * nv);
    for (int m = 0; m < 2 * nv; ++m) {
        long base = long(m - nv) * kFine + sub_offset;
        double acc = 0.0;
        for (int a = 0; a < kWide; ++a) {
            long idx = (base + long(a) * (M / kWide)) % M;
            if (idx < 0) idx += M;
            acc += full[idx];
        }
        out[m] = std::max(acc, 0.0);
    }
    return out;
}

void attach_spectrum(KernelTable& k) {
    const int L = 2 * k.nv;
    std::vector<double> circ(L);
    for (int m = 0; m < k.nv; ++m) circ[m] = k.vals[m + k.nv];  // offsets 0 .. nv-1
    for (int m = k.nv; m < L; ++m) circ[m] = k.vals[m - k.nv];  // offsets -nv .. -1
    k.spectrum.assign(L / 2 + 1, {});
    fft::rfft(circ.data(), k.spectrum.data(), L);
    double dv = k.dv();
    for (auto& c : k.spectrum) c *= dv;
}

}  // namespace

double KernelTable::l1_current() const {
    double s_ = 0.0;
    for (double x : vals) s_ += x;
    return s_ * dv();
}

double KernelTable::ball_moment_ratio(double Rball) const {
    double num = 0.0, den = 0.0;
    double d = dv();
    for (int m = 0; m < 2 * nv; ++m) {
        double off = offset(m);
        double w = std::isfinite(Rball) ? ball_weight(off, d, Rball) : 1.0;
        num += off * off * vals[m] * w;
        den += vals[m] * w;
    }
    if (!(den > 0.0)) throw std::invalid_argument("empty truncation ball");
    return num / den;
}

KernelTable build_kernel(double s, double t, int nv, double Lv) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel time must be positive");
    if (!(s > 0.0) || s > 1.0) throw std::invalid_argument("s must lie in (0, 1]");
    KernelTable k;
    k.s = s;
    k.t = t;
    k.nv = nv;
    k.Lv = Lv;
    k.vals = spectral_build([s, t](double xi) { return std::exp(-t * std::pow(xi, 2.0 * s)); },
                            nv, Lv, 0);
    k.l1 = k.l1_current();
    attach_spectrum(k);
    return k;
}

KernelTable delta_kernel(double s, int nv, double Lv) {
    KernelTable k;
    k.s = s;
    k.t = 0.0;
    k.nv = nv;
    k.Lv = Lv;
    k.vals.assign(2 * nv, 0.0);
    k.vals[nv] = 1.0 / k.dv();
    k.l1 = 1.0;
    k.renormalized = true;
    attach_spectrum(k);
    return k;
}

KernelTable truncate_renormalize(const KernelTable& k, double R) {
    if (!(2.0 * R >= k.dv())) throw std::invalid_argument("truncation ball narrower than one cell");
    KernelTable out = k;
    out.R = R;
    double d = k.dv();
    for (int m = 0; m < 2 * k.nv; ++m) out.vals[m] = k.vals[m] * ball_weight(k.offset(m), d, R);
    double m1 = out.l1_current();
    if (!(m1 > 0.0)) throw std::invalid_argument("empty truncation ball");
    for (double& x : out.vals) x /= m1;
    out.l1 = m1;  // mass before the final rescale, i.e. after truncation
    out.renormalized = true;
    attach_spectrum(out);
    return out;
}

KernelTable renormalize(const KernelTable& k) {
    KernelTable out = k;
    double m1 = k.l1_current();
    if (!(m1 > 0.0)) throw std::invalid_argument("cannot renormalize an empty kernel");
    for (double& x : out.vals) x /= m1;
    out.l1 = m1;
    out.renormalized = true;
    attach_spectrum(out);
    return out;
}

double moment_ratio(double s, double h, double R, int nv, double Lv) {
    KernelTable k = build_kernel(s, h, nv, Lv);
    return k.ball_moment_ratio(R);
}

namespace {

/// Shared row engine for both convolution variants. Multiplies the padded
/// row spectrum (length nv+1) by `mult` and splits the result into the
/// v-window and the leaked remainder.
struct RowConv {
    int nv;
    std::vector<double> pad;
    std::vector<std::complex<double>> spec;

    explicit RowConv(int nv_) : nv(nv_), pad(2 * nv_, 0.0), spec(nv_ + 1) {}

    // out[0..nv) = window; returns leak mass factor (sum of out-of-window cells)
    double apply(const double* row, const std::complex<double>* mult, double* out) {
        const int L = 2 * nv;
        std::copy(row, row + nv, pad.begin());
        std::fill(pad.begin() + nv, pad.end(), 0.0);
        fft::rfft(pad.data(), spec.data(), L);
        for (int q = 0; q <= nv; ++q) spec[q] *= mult[q];
        fft::irfft(spec.data(), pad.data(), L);
        double leak = 0.0;
        double inv = 1.0 / L;
        for (int j = 0; j < nv; ++j) out[j] = std::max(pad[j] * inv, 0.0);
        for (int j = nv; j < L; ++j) leak += pad[j] * inv;
        return leak;
    }
};

template <typename MultProvider>
DiffusionResult conv_rows(const DensityGrid& f, MultProvider mult, bool parallel) {
    const GridGeom& g = f.geom();
    DiffusionResult res{DensityGrid(g), 0.0};
    double leak = 0.0;
    if (parallel) {
#ifdef FKFPE_HAVE_OPENMP
#pragma omp parallel reduction(+ : leak)
        {
            RowConv rc(g.nv);
#pragma omp for schedule(static)
            for (int i = 0; i < g.nx; ++i)
                leak += rc.apply(f.row(i), mult, res.f.row(i));
        }
#else
        RowConv rc(g.nv);
        for (int i = 0; i < g.nx; ++i) leak += rc.apply(f.row(i), mult, res.f.row(i));
#endif
    } else {
        RowConv rc(g.nv);
        for (int i = 0; i < g.nx; ++i) leak += rc.apply(f.row(i), mult, res.f.row(i));
    }
    res.leak = leak * g.cell();
    return res;
}

std::vector<std::complex<double>> flow_multiplier(const GridGeom& g, double tau, double s) {
    const int L = 2 * g.nv;
    std::vector<std::complex<double>> mult(g.nv + 1);
    double dxi = 2.0 * M_PI / (L * g.dv());
    for (int q = 0; q <= g.nv; ++q)
        mult[q] = std::exp(-tau * std::pow(q * dxi, 2.0 * s));
    return mult;
}

void check_kernel_vs_grid(const DensityGrid& f, const KernelTable& k) {
    if (k.nv != f.geom().nv || k.Lv != f.geom().Lv)
        throw std::invalid_argument("kernel table does not match the grid");
    if (!k.renormalized)
        throw std::invalid_argument("diffusion_step needs a renormalized kernel");
}

}  // namespace

DiffusionResult diffusion_step(const DensityGrid& f, const KernelTable& k) {
    check_kernel_vs_grid(f, k);
    return conv_rows(f, k.spectrum.data(), true);
}

DiffusionResult diffusion_step_serial(const DensityGrid& f, const KernelTable& k) {
    check_kernel_vs_grid(f, k);
    return conv_rows(f, k.spectrum.data(), false);
}

DiffusionResult spectral_flow(const DensityGrid& f, double tau, double s) {
    if (tau < 0.0) throw std::invalid_argument("flow time must be nonnegative");
    auto mult = flow_multiplier(f.geom(), tau, s);
    return conv_rows(f, mult.data(), true);
}

DiffusionResult spectral_flow_serial(const DensityGrid& f, double tau, double s) {
    if (tau < 0.0) throw std::invalid_argument("flow time must be nonnegative");
    auto mult = flow_multiplier(f.geom(), tau, s);
    return conv_rows(f, mult.data(), false);
}

std::pair<double, double> potential_inflation_check(const DensityGrid& f, const Potential& psi,
                                                    double s, double h, double R) {
    const GridGeom& g = f.geom();
    KernelTable k = truncate_renormalize(build_kernel(s, h, g.nv, g.Lv), R);
    DiffusionResult bar = diffusion_step_serial(f, k);
    double lhs = potential_energy(bar.f, psi);
    double rhs = potential_energy(f, psi) + 0.5 * psi.hessian_sup * k.ball_moment_ratio(R);
    return {lhs, rhs};
}

std::vector<double> sample_multiplier_on_centers(const std::function<double(double)>& mult,
                                                 int nv, double Lv) {
    // cell center v_j = (j - nv/2) dv + dv/2 sits at fine-lattice index
    // kFine (j - nv/2) + kFine/2
    const int M = 2 * nv * kFine * kWide;
    const double dv = 2.0 * Lv / nv;
    const double P = M * (dv / kFine);
    std::vector<std::complex<double>> spec(M / 2 + 1);
    for (int k = 0; k <= M / 2; ++k) spec[k] = mult(2.0 * M_PI * k / P);
    std::vector<double> full(M);
    fft::irfft(spec.data(), full.data(), M);
    for (double& x : full) x /= P;
    std::vector<double> out(nv);
    for (int j = 0; j < nv; ++j) {
        long base = long(j - nv / 2) * kFine + kFine / 2;
        double acc = 0.0;
        for (int a = 0; a < kWide; ++a) {
            long idx = (base + long(a) * (M / kWide)) % M;
            if (idx < 0) idx += M;
            acc += full[idx];
        }
        out[j] = std::max(acc, 0.0);
    }
    return out;
}

}  // namespace fkfpe
