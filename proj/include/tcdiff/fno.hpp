#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "tcdiff/grid.hpp"

namespace tcdiff {

enum class Activation { Gelu, Identity };

// Fourier neural operator mapping (t, x) -> field at the resolution of x.
// Lift 2 -> width (the two input channels are x and the constant-t channel),
// `layers` blocks v -> act(W v + b + K v) where K is a per-mode complex matrix
// multiply on frequencies |k1| <= modes1, |k2| <= modes2, then a pointwise
// projection width -> 1. Parameters are resolution independent; at resolution
// N only the modes that fit strictly below Nyquist, |k_i| <= min(modes_i,
// (N - 1) / 2), are engaged, so coarse grids exercise a subset of the spectral
// weights and the same parameter vector transfers across the ladder.
struct FnoConfig {
  int layers = 4;
  int width = 32;
  int modes1 = 14;
  int modes2 = 14;
  Activation act = Activation::Gelu;
};

void validate(const FnoConfig& cfg);

// One stored representative per conjugate pair: (0, 0..m2) and
// (1..m1, -m2..m2); the mirrored half is reconstructed by conjugation.
std::size_t stored_mode_count(const FnoConfig& cfg);
std::size_t param_count(const FnoConfig& cfg);

struct FnoParams {
  FnoConfig cfg;
  // Flat layout: lift weights (width x 2), lift bias (width), then per layer
  // [W (width x width), b (width), P (modes x width x width x {re, im})],
  // then projection weights (width) and bias (1).
  std::vector<double> theta;
};

FnoParams fno_init(const FnoConfig& cfg, std::uint64_t seed);
FnoParams fno_zero(const FnoConfig& cfg);

// Forward tape: layer inputs, pre-activations and the spectral transforms
// needed by the backward pass. Reused across calls to avoid reallocation.
struct FnoTape {
  int n = 0;
  double t = 0.0;
  std::vector<double> x;
  std::vector<std::vector<double>> v;     // layer inputs + final activations
  std::vector<std::vector<double>> z;     // pre-activations per layer
  std::vector<std::vector<std::complex<double>>> vhat;  // per layer, mode-major
  std::vector<std::pair<int, int>> eff_modes;  // engaged (k1, k2)
  std::vector<int> eff_index;                  // stored index of each engaged mode
};

GridField fno_forward(const FnoParams& p, double t, const GridField& x);
GridField fno_forward(const FnoParams& p, double t, const GridField& x,
                      FnoTape& tape);

// grad_out.v[q] = dJ/dy[q] (plain partial derivatives, no quadrature weight).
// Accumulates dJ/dtheta into grad_theta (must be zero-initialized by the
// caller if accumulation is not wanted) and optionally writes dJ/dx.
void fno_backward(const FnoParams& p, const FnoTape& tape,
                  const GridField& grad_out, std::vector<double>& grad_theta,
                  GridField* grad_x = nullptr);

// Versioned little-endian binary checkpoint; byte-exact round trip.
void save_checkpoint(const FnoParams& p, const std::string& path);
FnoParams load_checkpoint(const std::string& path);

}  // namespace tcdiff
