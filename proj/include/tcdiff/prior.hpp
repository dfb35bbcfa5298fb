#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "tcdiff/grid.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/spectral.hpp"

namespace tcdiff {

// Gaussian measures N(0, Q) on the grid, diagonal in the Fourier basis:
// Q e_k = lambda_k e_k. All kinds except Standard are trace class with a
// resolution-stable spectrum at low frequency; Standard is white pixel noise
// (lambda_k = 1/N^2), the non-trace-class reference point.
enum class PriorKind { InvLaplacian, Bessel, FnoFilter, Combined, Standard };

struct PriorSpec {
  PriorKind kind = PriorKind::Bessel;
  // InvLaplacian: lambda_k = gamma1^2 mu_k^-power (zero at k = 0)
  // Bessel:       lambda_k = (gamma2 + mu_k)^-power
  // FnoFilter:    lambda_k = |phi_k|^2 inside the |k_i| <= m_i box, else 0
  // Combined:     sqrt symbol gamma0 phi_k + gamma1 mu_k^(-power/2)
  //               (FNO term only at k = 0); filter contributes inside its box
  // Standard:     lambda_k = 1/N^2
  double gamma1 = 1.0;
  double gamma2 = 1.0;
  double power = 2.0;
  double gamma0 = 0.0;
  int filter_m1 = 0;
  int filter_m2 = 0;
  double filter_scale = 1.0;
  std::uint64_t filter_seed = 0;
};

// Throws std::invalid_argument with a reason on out-of-range parameters
// (e.g. power <= 1 where summability needs > 1, nonpositive gammas).
void validate(const PriorSpec& spec);

// Symbol of the five-point discrete Laplacian at grid spacing h = 1/N:
// mu_k = 4 N^2 (sin^2(pi k1/N) + sin^2(pi k2/N)). Converges to 4 pi^2 |k|^2
// for fixed k, so eigenvalues drift mildly with N away from the continuum
// regime; nesting and trace stability are the contracts, not exact
// N-independence.
double five_point_eigenvalue(int k1, int k2, int n);

// Square-root symbol s_k with lambda_k = |s_k|^2. Complex only through the
// FnoFilter draw, which is conjugate-symmetrized so that apply_sqrt maps real
// fields to real fields.
std::complex<double> sqrt_symbol(const PriorSpec& spec, int k1, int k2, int n);
double eigenvalue(const PriorSpec& spec, int k1, int k2, int n);

// Slot-ordered tables for a full resolution; memoized internally.
const std::vector<double>& eigenvalues(const PriorSpec& spec, int n);
const std::vector<std::complex<double>>& sqrt_symbols(const PriorSpec& spec,
                                                      int n);

// Q^(1/2) f via spectral multiplication.
GridField apply_sqrt(const PriorSpec& spec, const GridField& f);

// Exact draw from N(0, Q_N): independent complex normals per conjugate pair,
// variance lambda_k, real on self-conjugate slots.
GridField sample_prior(const PriorSpec& spec, int n, RngStream& rng);

// trace(Q_N) = sum of lambda_k over all N^2 representable modes; equals
// E||sample||^2 under the grid norm.
double trace_at(const PriorSpec& spec, int n);

// Trace of the part of Q_{n_fine} removed by projection to n_coarse, i.e.
// sum over representable fine modes minus the open coarse box. This is the
// tr(Q - Q_n) term of the forward truncation identity.
double tail_trace(const PriorSpec& spec, int n_fine, int n_coarse);

}  // namespace tcdiff
