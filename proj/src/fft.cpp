#include "fkfpe/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace fkfpe {
namespace fft {

namespace {

// Plans are created once per length under a lock and executed through the
// new-array interface, which is thread-safe. FFTW_UNALIGNED keeps the plans
// valid for arbitrary heap buffers; FFTW_ESTIMATE keeps planning deterministic.
struct PlanCache {
    std::mutex mu;
    std::map<int, fftw_plan> fwd, bwd;

    fftw_plan get(int n, bool forward) {
        std::scoped_lock lock(mu);
        auto& m = forward ? fwd : bwd;
        auto it = m.find(n);
        if (it != m.end()) return it->second;
        std::vector<double> re(n, 0.0);
        std::vector<std::complex<double>> cp(n / 2 + 1);
        fftw_plan p;
        if (forward)
            p = fftw_plan_dft_r2c_1d(n, re.data(),
                                     reinterpret_cast<fftw_complex*>(cp.data()),
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
        else
            p = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(cp.data()),
                                     re.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        m.emplace(n, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

void rfft(const double* in, std::complex<double>* out, int n) {
    fftw_plan p = cache().get(n, true);
    fftw_execute_dft_r2c(p, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void irfft(const std::complex<double>* in, double* out, int n) {
    fftw_plan p = cache().get(n, false);
    // c2r destroys its input; work on a copy so callers can reuse spectra
    static thread_local std::vector<std::complex<double>> tmp;
    tmp.assign(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(tmp.data()), out);
}

}  // namespace fft
}  // namespace fkfpe
