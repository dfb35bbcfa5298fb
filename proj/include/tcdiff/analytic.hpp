#pragma once
#include <functional>
#include <vector>

#include "tcdiff/grid.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/schedule.hpp"

namespace tcdiff {

// Real coordinates of the spectral representation. Each self-conjugate slot
// contributes its (real) coefficient; each conjugate pair contributes
// (sqrt2 Re c, -sqrt2 Im c) at the lexicographically smaller slot. The map is
// an isometry: ||u||^2 = sum_j z_j^2, and a Gaussian N(0,Q) field has
// independent N(0, lambda_j) coordinates with lambda_j the eigenvalue of the
// slot the coordinate came from.
struct CoordMap {
  int n = 0;
  struct Entry {
    int si, sj;   // slot of the stored representative
    int part;     // 0: real part (or self-conjugate value), 1: imaginary part
  };
  std::vector<Entry> entries;
};

CoordMap make_coord_map(int n);
// Only coordinates whose eigenvalue exceeds `threshold` (the non-degenerate
// subspace of the prior).
CoordMap make_coord_map(int n, const PriorSpec& spec, double threshold);

std::vector<double> to_coords(const CoordMap& map, const GridField& u);
GridField from_coords(const CoordMap& map, const std::vector<double>& z);
std::vector<double> coord_eigenvalues(const CoordMap& map, const PriorSpec& spec);

// Gaussian data N(mean, P), P diagonal in the Fourier basis with per-mode
// variances p in slot order at mean.n.
struct GaussianData {
  GridField mean;
  std::vector<double> p;
};

// Q grad log p_t(x) for the forward marginal of Gaussian data under prior Q:
// per mode -lambda_k (x_k - abar mu_k) / (abar^2 p_k + btilde lambda_k),
// zero on modes with lambda_k = 0. Throws std::domain_error at t = 0 (the
// unsmoothed density need not be defined off the data support).
GridField gaussian_score(const GaussianData& data, const PriorSpec& q,
                         const Schedule& sched, double t, const GridField& x);

// Equal-weight Gaussian mixture with shared covariance Q (the prior itself).
struct GmmData {
  std::vector<GridField> means;
};

// Q grad log p_t(x) for the mixture marginal: with c_t = btilde + abar^2,
// responsibilities softmax_i(-|x - abar m_i|_{c_t Q}^2 / 2) over the
// non-degenerate modes, score -(x - abar sum_i w_i m_i)/c_t restricted to the
// non-degenerate subspace (zero on the null space of Q). Valid on all of
// [0, T]. Throws std::domain_error if x carries more than support_tol energy
// on the null space.
GridField gmm_score(const GmmData& data, const PriorSpec& q,
                    const Schedule& sched, double t, const GridField& x,
                    double support_tol = 1e-8);

// Mixture responsibilities at (t, x); exposed for the sampler and tests.
std::vector<double> gmm_weights(const GmmData& data, const PriorSpec& q,
                                const Schedule& sched, double t,
                                const GridField& x, double support_tol = 1e-8);

// Brute-force grad log p_t(z) in R^d coordinates, estimated by Monte Carlo
// over data draws z0 via the smoothing-kernel ratio
//   score_k = -a/(a^2-1) * lambda_k^-1 * E[w (a z - z0)_k] / E[w],
//   log w = -(2(a^2-1))^-1 sum_k (a z - z0)_k^2 / lambda_k,
// with log-sum-exp stabilization. ess reports the normalized effective sample
// size (1/n) (sum w)^2 / sum w^2 as an estimate-quality diagnostic. Requires
// t > 0 and lambda_k > 0 for all supplied coordinates.
struct OracleResult {
  std::vector<double> score;
  double ess = 0.0;
};

OracleResult brute_force_score_oracle(
    const std::function<std::vector<double>(RngStream&)>& sample_z0,
    const std::vector<double>& lambda, const Schedule& sched, double t,
    const std::vector<double>& z, int n_mc, RngStream& rng);

}  // namespace tcdiff
