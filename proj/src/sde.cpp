#include "tcdiff/sde.hpp"

#include <cmath>
#include <stdexcept>

namespace tcdiff {

ForwardDraw forward_sample(const GridField& x0, double t, const Schedule& sched,
                           const PriorSpec& prior, RngStream& rng) {
  if (t < 0.0 || t > sched.T)
    throw std::invalid_argument("forward_sample: t outside [0, T]");
  ForwardDraw d;
  d.eta = sample_prior(prior, x0.n, rng);
  const double ab = abar_t(sched, t);
  const double sb = std::sqrt(btilde_t(sched, t));
  d.xt = x0;
  d.xt *= ab;
  d.xt.axpy(sb, d.eta);
  return d;
}

TruncationCheck forward_truncation_error(
    const std::function<GridField(RngStream&)>& sample_x0, double data_term,
    int n_coarse, double t, const Schedule& sched, const PriorSpec& prior,
    int n_mc, RngStream& rng) {
  if (n_mc < 2) throw std::invalid_argument("forward_truncation_error: n_mc < 2");
  double sum = 0.0, sumsq = 0.0;
  int n_fine = 0;
  for (int i = 0; i < n_mc; ++i) {
    RngStream s = rng.fork(i);
    const GridField x0 = sample_x0(s);
    n_fine = x0.n;
    const ForwardDraw d = forward_sample(x0, t, sched, prior, s);
    const GridField diff =
        d.xt - upsample_to(project_to_modes(d.xt, n_coarse), d.xt.n);
    const double v = norm2(diff);
    sum += v;
    sumsq += v * v;
  }
  TruncationCheck out;
  out.lhs_mc = sum / n_mc;
  const double var = (sumsq - sum * sum / n_mc) / (n_mc - 1);
  out.se = std::sqrt(var / n_mc);
  out.rhs_exact = std::exp(-int_alpha(sched, t)) * data_term +
                  btilde_t(sched, t) * tail_trace(prior, n_fine, n_coarse);
  return out;
}

GridField reverse_euler_maruyama(const ScoreFn& score, const GridField& y0,
                                 const Schedule& sched, const PriorSpec& prior,
                                 const ReverseConfig& cfg, RngStream& rng) {
  if (cfg.steps < 1) throw std::invalid_argument("reverse EM: steps < 1");
  const double delta = cfg.delta < 0.0 ? 1e-3 * sched.T : cfg.delta;
  if (delta <= 0.0 || delta >= sched.T)
    throw std::invalid_argument("reverse EM: delta outside (0, T)");
  const double h = (sched.T - delta) / cfg.steps;
  GridField y = y0;
  for (int i = 0; i < cfg.steps; ++i) {
    const double t_fwd = sched.T - i * h;
    const double al = alpha_t(sched, t_fwd);
    const GridField s = score(t_fwd, y);
    GridField drift = y;
    drift *= 0.5 * al;
    drift.axpy(std::sqrt(al), s);
    y.axpy(h, drift);
    const GridField w = sample_prior(prior, y.n, rng);
    y.axpy(std::sqrt(al * h), w);
  }
  return y;
}

}  // namespace tcdiff
