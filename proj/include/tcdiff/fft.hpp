#pragma once
#include <complex>

namespace tcdiff {

// Unnormalized in-place 2-D c2c transform on an n x n row-major array.
// sign = -1: X(k) = sum_p x(p) exp(-2*pi*i*k.p/n)
// sign = +1: x(p) = sum_k X(k) exp(+2*pi*i*k.p/n)
// Backed by FFTW (plans cached per (n, sign), guarded by a mutex; execution
// is thread-safe). Any n >= 1 is supported.
void fft2_inplace(int n, std::complex<double>* data, int sign);

}  // namespace tcdiff
