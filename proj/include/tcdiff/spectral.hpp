#pragma once
#include <complex>
#include <vector>

#include "tcdiff/grid.hpp"

namespace tcdiff {

// Fourier coefficients of a GridField against e_k(x) = exp(2*pi*i*k.x),
// c_k = <u, e_k> = (1/N^2) sum_p u(p) exp(-2*pi*i*k.p/N).
// Storage is FFT slot order: slot s in {0..N-1} holds integer frequency
// k = s for s <= N/2 and k = s - N otherwise, so the index set per axis is
// -N/2 < k <= N/2 (the +N/2 representative is the Nyquist slot for even N).
// Parseval under the grid inner product: norm2(u) = sum_k |c_k|^2.
struct SpectralCoeffs {
  int n = 0;
  std::vector<std::complex<double>> c;

  SpectralCoeffs() = default;
  explicit SpectralCoeffs(int n_)
      : n(n_), c(static_cast<std::size_t>(n_) * n_) {}

  std::complex<double>& at_slot(int si, int sj) {
    return c[static_cast<std::size_t>(si) * n + sj];
  }
  std::complex<double> at_slot(int si, int sj) const {
    return c[static_cast<std::size_t>(si) * n + sj];
  }
  std::complex<double>& at_freq(int k1, int k2);
  std::complex<double> at_freq(int k1, int k2) const;
};

inline int freq_of_slot(int s, int n) { return s <= n / 2 ? s : s - n; }
inline int slot_of_freq(int k, int n) { return ((k % n) + n) % n; }

SpectralCoeffs dft2(const GridField& u);
// Real part of the inverse transform; imaginary residue of conjugate-symmetric
// input is discarded.
GridField idft2(const SpectralCoeffs& c);

// Restriction to the open mode box {|k_i| <= target_n/2 - 1}. Fixed Nyquist
// convention: frequencies with |k_i| = target_n/2 are dropped (the target's
// Nyquist slots come back zero), which makes the family of projections
// orthogonal and exactly nested across the dyadic ladder. target_n == u.n is
// allowed and annihilates the field's own Nyquist content. Both resolutions
// must be powers of two.
GridField project_to_modes(const GridField& u, int target_n);

// Zero-padding embedding: coefficients on the open box of u.n are copied,
// everything else is zero. Isometric, and inverted exactly by
// project_to_modes(., u.n), on fields without Nyquist content (the canonical
// range of project_to_modes); source Nyquist rows are dropped, matching the
// projection convention. Both resolutions must be powers of two.
GridField upsample_to(const GridField& u, int target_n);

bool is_power_of_two(int n);

}  // namespace tcdiff
