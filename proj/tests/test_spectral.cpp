#include <cmath>
#include <complex>

#include "doctest.h"
#include "tcdiff/grid.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/spectral.hpp"

using namespace tcdiff;

namespace {

GridField random_field(int n, std::uint64_t seed) {
  GridField f(n);
  RngStream s(seed);
  for (auto& v : f.v) v = s.normal();
  return f;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("constant field concentrates at zero frequency") {
  GridField u(8, 3.25);
  const SpectralCoeffs c = dft2(u);
  CHECK(c.at_freq(0, 0).real() == doctest::Approx(3.25));
  CHECK(std::abs(c.at_freq(0, 0).imag()) < 1e-14);
  double rest = 0.0;
  for (int si = 0; si < 8; ++si)
    for (int sj = 0; sj < 8; ++sj)
      if (si || sj) rest += std::norm(c.at_slot(si, sj));
  CHECK(rest < 1e-26);
}

TEST_CASE("cosine splits into a conjugate pair, independent of resolution") {
  for (int n : {32, 64}) {
    GridField u(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u.at(i, j) = std::cos(2.0 * M_PI * i / n);
    const SpectralCoeffs c = dft2(u);
    CHECK(c.at_freq(1, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c.at_freq(-1, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
    // grid norm of cos is 1/2 at every resolution
    CHECK(norm2(u) == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("parseval and round trip") {
  const GridField u = random_field(16, 99);
  const SpectralCoeffs c = dft2(u);
  double spec = 0.0;
  for (const auto& z : c.c) spec += std::norm(z);
  CHECK(spec == doctest::Approx(norm2(u)).epsilon(1e-12));
  const GridField back = idft2(c);
  for (std::size_t q = 0; q < u.size(); ++q)
    CHECK(back.v[q] == doctest::Approx(u.v[q]).epsilon(1e-12));
}

TEST_CASE("slot and frequency indexing agree") {
  const int n = 16;
  for (int s = 0; s < n; ++s) {
    const int k = freq_of_slot(s, n);
    CHECK(k > -n / 2 - 1);
    CHECK(k <= n / 2);
    CHECK(slot_of_freq(k, n) == s);
  }
  SpectralCoeffs c(n);
  c.at_freq(-3, 5) = {1.5, -0.5};
  CHECK(c.at_slot(slot_of_freq(-3, n), slot_of_freq(5, n)) ==
        std::complex<double>(1.5, -0.5));
}

TEST_CASE("projection restricts to the open coarse box") {
  const GridField u = random_field(64, 7);
  const GridField p = project_to_modes(u, 16);
  REQUIRE(p.n == 16);
  const SpectralCoeffs cu = dft2(u);
  const SpectralCoeffs cp = dft2(p);
  for (int k1 = -7; k1 <= 7; ++k1)
    for (int k2 = -7; k2 <= 7; ++k2) {
      const std::complex<double> a = cu.at_freq(k1, k2);
      const std::complex<double> b = cp.at_freq(k1, k2);
      CHECK(std::abs(a - b) < 1e-12);
    }
  // the coarse Nyquist band comes back empty
  for (int k = -7; k <= 8; ++k) {
    CHECK(std::abs(cp.at_freq(8, k)) < 1e-13);
    CHECK(std::abs(cp.at_freq(k, 8)) < 1e-13);
  }
}

TEST_CASE("projection never increases the norm, nesting is exact") {
  const GridField u = random_field(64, 21);
  const GridField p32 = project_to_modes(u, 32);
  const GridField p16a = project_to_modes(p32, 16);
  const GridField p16b = project_to_modes(u, 16);
  CHECK(norm2(p32) <= norm2(u) + 1e-12);
  CHECK(norm2(p16a) <= norm2(p32) + 1e-12);
  for (std::size_t q = 0; q < p16a.size(); ++q)
    CHECK(p16a.v[q] == doctest::Approx(p16b.v[q]).epsilon(1e-10));
}

TEST_CASE("upsampling is an isometry and round trips on canonical fields") {
  const GridField raw = random_field(16, 5);
  const GridField w = project_to_modes(raw, 16);  // strip own Nyquist band
  const GridField up = upsample_to(w, 64);
  CHECK(norm2(up) == doctest::Approx(norm2(w)).epsilon(1e-12));
  const GridField back = project_to_modes(up, 16);
  for (std::size_t q = 0; q < w.size(); ++q)
    CHECK(back.v[q] == doctest::Approx(w.v[q]).epsilon(1e-10));
}

TEST_CASE("same-resolution projection strips exactly the Nyquist content") {
  const int n = 8;
  SpectralCoeffs c(n);
  c.at_freq(4, 1) = {0.3, 0.0};   // Nyquist row entries pair under conjugation
  c.at_freq(-1, 4) = {0.0, 0.2};
  c.at_freq(1, -4) = {0.0, -0.2};
  c.at_freq(2, 2) = {0.5, 0.1};
  c.at_freq(-2, -2) = {0.5, -0.1};
  const GridField u = idft2(c);
  const GridField p = project_to_modes(u, n);
  const SpectralCoeffs cp = dft2(p);
  CHECK(std::abs(cp.at_freq(4, 1)) < 1e-13);
  CHECK(std::abs(cp.at_freq(-1, 4)) < 1e-13);
  CHECK(std::abs(cp.at_freq(2, 2) - std::complex<double>(0.5, 0.1)) < 1e-13);
}

TEST_CASE("degenerate sizes") {
  const GridField u = random_field(8, 3);
  const GridField p1 = project_to_modes(u, 1);
  REQUIRE(p1.n == 1);
  // only k = 0 survives: the grid mean
  double mean = 0.0;
  for (double v : u.v) mean += v / 64.0;
  CHECK(p1.v[0] == doctest::Approx(mean).epsilon(1e-12));
  CHECK_THROWS_AS((void)project_to_modes(u, 12), std::invalid_argument);
  CHECK_THROWS_AS((void)project_to_modes(u, 16), std::invalid_argument);
  CHECK_THROWS_AS((void)upsample_to(u, 12), std::invalid_argument);
  CHECK_THROWS_AS((void)upsample_to(u, 4), std::invalid_argument);
  CHECK(is_power_of_two(1));
  CHECK(is_power_of_two(64));
  CHECK(!is_power_of_two(0));
  CHECK(!is_power_of_two(48));
}

}  // TEST_SUITE
