#include "tcdiff/spectral.hpp"

#include <stdexcept>

#include "tcdiff/fft.hpp"

namespace tcdiff {

std::complex<double>& SpectralCoeffs::at_freq(int k1, int k2) {
  return at_slot(slot_of_freq(k1, n), slot_of_freq(k2, n));
}

std::complex<double> SpectralCoeffs::at_freq(int k1, int k2) const {
  return at_slot(slot_of_freq(k1, n), slot_of_freq(k2, n));
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

SpectralCoeffs dft2(const GridField& u) {
  SpectralCoeffs out(u.n);
  for (std::size_t i = 0; i < u.v.size(); ++i) out.c[i] = u.v[i];
  fft2_inplace(u.n, out.c.data(), -1);
  const double scale = 1.0 / (static_cast<double>(u.n) * u.n);
  for (auto& z : out.c) z *= scale;
  return out;
}

GridField idft2(const SpectralCoeffs& coeffs) {
  std::vector<std::complex<double>> buf = coeffs.c;
  fft2_inplace(coeffs.n, buf.data(), +1);
  GridField out(coeffs.n);
  for (std::size_t i = 0; i < buf.size(); ++i) out.v[i] = buf[i].real();
  return out;
}

namespace {
void check_dyadic_pair(int a, int b, const char* what) {
  if (!is_power_of_two(a) || !is_power_of_two(b))
    throw std::invalid_argument(std::string(what) +
                                ": resolutions must be powers of two");
}
}  // namespace

GridField project_to_modes(const GridField& u, int target_n) {
  check_dyadic_pair(u.n, target_n, "project_to_modes");
  if (target_n > u.n)
    throw std::invalid_argument("project_to_modes: target exceeds source");
  const SpectralCoeffs src = dft2(u);
  SpectralCoeffs dst(target_n);
  const int kmax = (target_n - 1) / 2;  // strict |k| < n/2; keeps k=0 at n=1
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2)
      dst.at_freq(k1, k2) = src.at_freq(k1, k2);
  return idft2(dst);
}

GridField upsample_to(const GridField& u, int target_n) {
  check_dyadic_pair(u.n, target_n, "upsample_to");
  if (target_n < u.n)
    throw std::invalid_argument("upsample_to: target below source");
  const SpectralCoeffs src = dft2(u);
  SpectralCoeffs dst(target_n);
  const int kmax = (u.n - 1) / 2;
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2)
      dst.at_freq(k1, k2) = src.at_freq(k1, k2);
  return idft2(dst);
}

}  // namespace tcdiff
