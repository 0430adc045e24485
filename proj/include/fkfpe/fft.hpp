#pragma once

#include <complex>
#include <vector>

namespace fkfpe {

/// Thin FFTW wrapper: cached unaligned plans, thread-safe execution.
/// Transforms are real<->complex, length n (n/2+1 complex bins), unnormalized
/// (irfft of rfft multiplies by n).
namespace fft {

void rfft(const double* in, std::complex<double>* out, int n);
void irfft(const std::complex<double>* in, double* out, int n);

}  // namespace fft

}  // namespace fkfpe
