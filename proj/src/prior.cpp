#include "tcdiff/prior.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace tcdiff {

void validate(const PriorSpec& spec) {
  auto fail = [](const std::string& why) {
    throw std::invalid_argument("PriorSpec: " + why);
  };
  switch (spec.kind) {
    case PriorKind::InvLaplacian:
      if (spec.gamma1 <= 0.0) fail("InvLaplacian needs gamma1 > 0");
      if (spec.power <= 1.0) fail("InvLaplacian needs power > 1");
      break;
    case PriorKind::Bessel:
      if (spec.gamma2 <= 0.0) fail("Bessel needs gamma2 > 0");
      if (spec.power <= 1.0) fail("Bessel needs power > 1");
      break;
    case PriorKind::FnoFilter:
      if (spec.filter_m1 < 0 || spec.filter_m2 < 0) fail("negative mode cutoff");
      if (spec.filter_scale <= 0.0) fail("FnoFilter needs scale > 0");
      break;
    case PriorKind::Combined:
      if (spec.gamma0 < 0.0 || spec.gamma1 < 0.0) fail("negative weight");
      if (spec.gamma1 > 0.0 && spec.power <= 1.0)
        fail("Combined needs power > 1 when gamma1 > 0");
      if (spec.filter_m1 < 0 || spec.filter_m2 < 0) fail("negative mode cutoff");
      if (spec.filter_scale <= 0.0) fail("Combined needs filter scale > 0");
      break;
    case PriorKind::Standard:
      break;
  }
}

double five_point_eigenvalue(int k1, int k2, int n) {
  const double s1 = std::sin(M_PI * k1 / n);
  const double s2 = std::sin(M_PI * k2 / n);
  return 4.0 * n * n * (s1 * s1 + s2 * s2);
}

namespace {

// Filter value phi at an integer mode, identical at every resolution: the
// draw is keyed by (seed, k1, k2) alone, then conjugate-symmetrized with the
// mirrored mode.
std::complex<double> filter_raw(std::uint64_t seed, int k1, int k2,
                                double scale) {
  const std::uint64_t label =
      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(k1)) << 32) |
      static_cast<std::uint64_t>(static_cast<std::uint32_t>(k2));
  RngStream s = RngStream(seed).fork(0x66696c74ULL).fork(label);
  const double inv_sqrt2 = 0.7071067811865475244;
  const double re = s.normal() * inv_sqrt2;
  const double im = s.normal() * inv_sqrt2;
  return scale * std::complex<double>(re, im);
}

std::complex<double> filter_value(std::uint64_t seed, int k1, int k2,
                                  double scale) {
  const std::complex<double> a = filter_raw(seed, k1, k2, scale);
  const std::complex<double> b = filter_raw(seed, -k1, -k2, scale);
  return 0.5 * (a + std::conj(b));
}

bool in_filter_box(const PriorSpec& spec, int k1, int k2) {
  return std::abs(k1) <= spec.filter_m1 && std::abs(k2) <= spec.filter_m2;
}

}  // namespace

std::complex<double> sqrt_symbol(const PriorSpec& spec, int k1, int k2, int n) {
  const double mu = five_point_eigenvalue(k1, k2, n);
  switch (spec.kind) {
    case PriorKind::InvLaplacian:
      if (k1 == 0 && k2 == 0) return 0.0;
      return spec.gamma1 * std::pow(mu, -0.5 * spec.power);
    case PriorKind::Bessel:
      return std::pow(spec.gamma2 + mu, -0.5 * spec.power);
    case PriorKind::FnoFilter:
      if (!in_filter_box(spec, k1, k2)) return 0.0;
      return filter_value(spec.filter_seed, k1, k2, spec.filter_scale);
    case PriorKind::Combined: {
      std::complex<double> s = 0.0;
      if (spec.gamma0 > 0.0 && in_filter_box(spec, k1, k2))
        s += spec.gamma0 * filter_value(spec.filter_seed, k1, k2, spec.filter_scale);
      if (spec.gamma1 > 0.0 && !(k1 == 0 && k2 == 0))
        s += spec.gamma1 * std::pow(mu, -0.5 * spec.power);
      return s;
    }
    case PriorKind::Standard:
      return 1.0 / n;
  }
  return 0.0;
}

double eigenvalue(const PriorSpec& spec, int k1, int k2, int n) {
  return std::norm(sqrt_symbol(spec, k1, k2, n));
}

namespace {

std::string spec_key(const PriorSpec& spec, int n) {
  std::ostringstream os;
  os.precision(17);
  os << static_cast<int>(spec.kind) << '|' << spec.gamma0 << '|' << spec.gamma1
     << '|' << spec.gamma2 << '|' << spec.power << '|' << spec.filter_m1 << '|'
     << spec.filter_m2 << '|' << spec.filter_scale << '|' << spec.filter_seed
     << '|' << n;
  return os.str();
}

struct SymbolCache {
  std::mutex mu;
  std::map<std::string, std::vector<std::complex<double>>> sqrts;
  std::map<std::string, std::vector<double>> lams;
};

SymbolCache& symbol_cache() {
  static SymbolCache c;
  return c;
}

}  // namespace

const std::vector<std::complex<double>>& sqrt_symbols(const PriorSpec& spec,
                                                      int n) {
  auto& c = symbol_cache();
  std::lock_guard<std::mutex> lock(c.mu);
  const std::string key = spec_key(spec, n);
  auto it = c.sqrts.find(key);
  if (it != c.sqrts.end()) return it->second;
  std::vector<std::complex<double>> table(static_cast<std::size_t>(n) * n);
  for (int si = 0; si < n; ++si)
    for (int sj = 0; sj < n; ++sj)
      table[static_cast<std::size_t>(si) * n + sj] =
          sqrt_symbol(spec, freq_of_slot(si, n), freq_of_slot(sj, n), n);
  return c.sqrts.emplace(key, std::move(table)).first->second;
}

const std::vector<double>& eigenvalues(const PriorSpec& spec, int n) {
  auto& c = symbol_cache();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.lams.find(spec_key(spec, n));
    if (it != c.lams.end()) return it->second;
  }
  const auto& sq = sqrt_symbols(spec, n);
  std::lock_guard<std::mutex> lock(c.mu);
  std::vector<double> lam(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) lam[i] = std::norm(sq[i]);
  return c.lams.emplace(spec_key(spec, n), std::move(lam)).first->second;
}

GridField apply_sqrt(const PriorSpec& spec, const GridField& f) {
  const auto& sq = sqrt_symbols(spec, f.n);
  SpectralCoeffs coeffs = dft2(f);
  for (std::size_t i = 0; i < coeffs.c.size(); ++i) coeffs.c[i] *= sq[i];
  return idft2(coeffs);
}

GridField sample_prior(const PriorSpec& spec, int n, RngStream& rng) {
  const auto& lam = eigenvalues(spec, n);
  SpectralCoeffs coeffs(n);
  const double inv_sqrt2 = 0.7071067811865475244;
  for (int si = 0; si < n; ++si) {
    for (int sj = 0; sj < n; ++sj) {
      const int mi = (n - si) % n;
      const int mj = (n - sj) % n;
      const bool self = (mi == si && mj == sj);
      if (!self && (mi < si || (mi == si && mj < sj))) continue;  // mirror fills
      const double sd = std::sqrt(lam[static_cast<std::size_t>(si) * n + sj]);
      if (self) {
        coeffs.at_slot(si, sj) = sd * rng.normal();
      } else {
        const std::complex<double> z(rng.normal() * inv_sqrt2,
                                     rng.normal() * inv_sqrt2);
        coeffs.at_slot(si, sj) = sd * z;
        coeffs.at_slot(mi, mj) = sd * std::conj(z);
      }
    }
  }
  return idft2(coeffs);
}

double trace_at(const PriorSpec& spec, int n) {
  const auto& lam = eigenvalues(spec, n);
  double acc = 0.0;
  for (double l : lam) acc += l;
  return acc;
}

double tail_trace(const PriorSpec& spec, int n_fine, int n_coarse) {
  if (n_coarse > n_fine)
    throw std::invalid_argument("tail_trace: coarse exceeds fine");
  const auto& lam = eigenvalues(spec, n_fine);
  double kept = 0.0;
  const int kmax = (n_coarse - 1) / 2;
  for (int k1 = -kmax; k1 <= kmax; ++k1)
    for (int k2 = -kmax; k2 <= kmax; ++k2)
      kept += lam[static_cast<std::size_t>(slot_of_freq(k1, n_fine)) * n_fine +
                  slot_of_freq(k2, n_fine)];
  return trace_at(spec, n_fine) - kept;
}

}  // namespace tcdiff
