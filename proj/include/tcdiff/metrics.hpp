#pragma once
#include <functional>
#include <vector>

#include "tcdiff/analytic.hpp"
#include "tcdiff/data.hpp"
#include "tcdiff/grid.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/schedule.hpp"
#include "tcdiff/sde.hpp"

namespace tcdiff {

// Average over n_proj random unit directions (uniform under the grid inner
// product) of the 1-D Wasserstein-2 distance between the projected samples,
// matched on min(|a|, |b|) quantiles. Writes a warning line to stderr when
// the sets' provenance mixes native with projected content.
double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int n_proj,
                          RngStream& rng);

// Min-max rescaling of each field to [0,1]; applied to image samples before
// sliced Wasserstein comparisons. Constant fields map to 0.
SampleSet rescale_unit(const SampleSet& set);

// Squared Wasserstein-2 distance between Gaussians diagonal in the Fourier
// basis: ||m1 - m2||^2 + sum_k (sqrt(lam1_k) - sqrt(lam2_k))^2 over all
// representable modes (slot order).
double gaussian_w2_diag(const GridField& m1, const std::vector<double>& lam1,
                        const GridField& m2, const std::vector<double>& lam2);

// E || model - reference ||^2 over forward draws (x0 ~ sampler, t ~ t_sampler,
// x_t | x0, t), absolute and relative to E || reference ||^2. Both callbacks
// take (t, x_t) and should return the same parameterization (normally
// g_t Q grad log p_t).
struct ScoreErrorResult {
  double abs_sq = 0.0;
  double rel_sq = 0.0;
  double ref_sq = 0.0;
};

ScoreErrorResult score_error(const ScoreFn& model, const ScoreFn& reference,
                             const std::function<GridField(RngStream&)>& sample_x0,
                             const PriorSpec& prior, const Schedule& sched,
                             const std::function<double(RngStream&)>& sample_t,
                             int n_mc, RngStream& rng);

// Certificate for the reverse-process perturbation bound
//   W2^2(path laws on [0, t0])
//     <= 12 ( t0 eps e^{4 xi t0^2} + e^{3 xi t0^2} W2^2(P_{X_T}, N(0, Q)) ),
// for Gaussian data, where the perturbed drift is f + d with a fixed field d
// (so eps = t0 ||d||^2 exactly) and xi = sup_{s <= t0} (alpha_{T-s}^2/4 +
// L_s^2) with L_s the Lipschitz constant of the true reverse drift f(s, .).
// The left side is estimated by coupling both chains (shared initial
// optimal-coupling draw, shared Wiener increments) and averaging the path
// supremum of ||Y - Ytil||^2. Everything exponential is kept in logs: the
// bound is astronomically loose for stiff schedules, but finite and exact in
// log space.
struct PathBoundCertificate {
  double epsilon = 0.0;
  double log_lhs = 0.0;
  double log_rhs = 0.0;
  double log_eps_term = 0.0;
  double log_w2_term = 0.0;
  double xi = 0.0;
  double lipschitz = 0.0;
  double w2_init = 0.0;  // W2^2(P_{X_T}, N(0, Q))
};

PathBoundCertificate path_bound_certificate(
    const GaussianData& data, const PriorSpec& prior, const Schedule& sched,
    double t0, const GridField& perturbation, int n_paths, int steps,
    RngStream& rng);

}  // namespace tcdiff
