#pragma once
#include <functional>

#include "tcdiff/grid.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/schedule.hpp"

namespace tcdiff {

// Forward process dX = -1/2 alpha_t X dt + sqrt(alpha_t) dW^Q. Conditionally
// on X_0 = x0, X_t = abar_t x0 + sqrt(btilde_t) eta with eta ~ N(0, Q).
struct ForwardDraw {
  GridField xt;
  GridField eta;  // the N(0,Q) draw; the DSM regression target is built from it
};

ForwardDraw forward_sample(const GridField& x0, double t, const Schedule& sched,
                           const PriorSpec& prior, RngStream& rng);

// Monte Carlo check of the truncation identity
//   E||X_t - P_n X_t||^2 = abar_t^2 E||X_0 - P_n X_0||^2
//                          + btilde_t (tr Q - tr Q_n)
// under the coupling P_n X_t = forward of the projected initial condition
// with the same noise. Returns (MC lhs, exact rhs, MC standard error of lhs).
// data_term must be the exact E||X_0 - P_n X_0||^2 for the supplied sampler.
struct TruncationCheck {
  double lhs_mc = 0.0;
  double rhs_exact = 0.0;
  double se = 0.0;
};

TruncationCheck forward_truncation_error(
    const std::function<GridField(RngStream&)>& sample_x0, double data_term,
    int n_coarse, double t, const Schedule& sched, const PriorSpec& prior,
    int n_mc, RngStream& rng);

// Score callback in the trained parameterization s(t, y) ~ g_t Q grad log p_t,
// evaluated at forward time t.
using ScoreFn = std::function<GridField(double, const GridField&)>;

struct ReverseConfig {
  int steps = 200;
  double delta = -1.0;  // early-stopping time; < 0 means 1e-3 * T
  std::uint64_t seed = 0;
};

// Euler-Maruyama for the time-reversed SDE
//   dY = (1/2 alpha_{T-s} Y + sqrt(alpha_{T-s}) score(T-s, Y)) ds
//        + sqrt(alpha_{T-s}) dW^Q
// integrated over s in [0, T - delta] on a uniform grid of `steps` steps,
// starting from y0 (normally a draw from N(0, Q_n)).
GridField reverse_euler_maruyama(const ScoreFn& score, const GridField& y0,
                                 const Schedule& sched, const PriorSpec& prior,
                                 const ReverseConfig& cfg, RngStream& rng);

}  // namespace tcdiff
