#include "tcdiff/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "tcdiff/spectral.hpp"

namespace tcdiff {

namespace {

struct DsmDraw {
  GridField xt;
  GridField eta;
  double t;
  double weight;  // sqrt(btilde)/g at t
};

DsmDraw dsm_draw(const FieldSampler& sample_x0, const PriorSpec& prior,
                 const Schedule& sched, RngStream& s) {
  DsmDraw d;
  const GridField x0 = sample_x0(s);
  d.t = s.uniform(0.0, sched.T);
  ForwardDraw f = forward_sample(x0, d.t, sched, prior, s);
  d.xt = std::move(f.xt);
  d.eta = std::move(f.eta);
  d.weight = std::sqrt(btilde_t(sched, d.t)) / g_t(sched, d.t);
  return d;
}

}  // namespace

DsmResult dsm_loss(const FnoParams& params, const FieldSampler& sample_x0,
                   const PriorSpec& prior, const Schedule& sched, int batch,
                   RngStream& rng, bool want_grad) {
  if (batch < 1) throw std::invalid_argument("dsm_loss: batch < 1");
  if (!(alpha_t(sched, 0.0) > 0.0))
    throw std::invalid_argument("dsm_loss: schedule must have alpha > 0");
  DsmResult out;
  if (want_grad) out.grad.assign(params.theta.size(), 0.0);
  FnoTape tape;
  for (int i = 0; i < batch; ++i) {
    RngStream s = rng.fork(i);
    const DsmDraw d = dsm_draw(sample_x0, prior, sched, s);
    const GridField y = fno_forward(params, d.t, d.xt, tape);
    GridField r = d.eta;
    r.axpy(d.weight, y);
    out.loss += norm2(r) / batch;
    if (want_grad) {
      const double scale =
          2.0 * d.weight / (batch * static_cast<double>(y.n) * y.n);
      GridField gy = r;
      gy *= scale;
      fno_backward(params, tape, gy, out.grad);
    }
  }
  return out;
}

double dsm_loss_of_score(const ScoreFn& score, const FieldSampler& sample_x0,
                         const PriorSpec& prior, const Schedule& sched,
                         int batch, RngStream& rng) {
  if (batch < 1) throw std::invalid_argument("dsm_loss_of_score: batch < 1");
  double loss = 0.0;
  for (int i = 0; i < batch; ++i) {
    RngStream s = rng.fork(i);
    const DsmDraw d = dsm_draw(sample_x0, prior, sched, s);
    GridField r = d.eta;
    r.axpy(d.weight, score(d.t, d.xt));
    loss += norm2(r) / batch;
  }
  return loss;
}

void adam_step(FnoParams& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg) {
  const std::size_t n = params.theta.size();
  if (grad.size() != n) throw std::invalid_argument("adam_step: size mismatch");
  if (state.m.empty()) {
    state.m.assign(n, 0.0);
    state.v.assign(n, 0.0);
    state.step = 0;
  }
  if (state.m.size() != n) throw std::invalid_argument("adam_step: stale state");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, state.step);
  const double bc2 = 1.0 - std::pow(cfg.beta2, state.step);
  for (std::size_t i = 0; i < n; ++i) {
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params.theta[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

void write_run_log(const RunLog& log, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_run_log: cannot open " + path);
  f << "epoch,level,resolution,train_loss,val_loss,val_loss_fine,wall_sec,"
       "checkpoint\n";
  f.precision(12);
  for (const auto& r : log.rows)
    f << r.epoch << ',' << r.level << ',' << r.resolution << ',' << r.train_loss
      << ',' << r.val_loss << ',' << r.val_loss_fine << ',' << r.wall_sec << ','
      << r.checkpoint << '\n';
  if (!f) throw std::runtime_error("write_run_log: write failed: " + path);
}

TrainResult train(const FnoConfig& cfg, const TrainConfig& tc,
                  const FieldSampler& native_sampler, int native_n,
                  const PriorSpec& prior, const Schedule& sched,
                  const std::optional<FnoParams>& warm_start) {
  validate(cfg);
  validate(sched);
  validate(prior);
  if (tc.ladder.empty()) throw std::invalid_argument("train: empty ladder");
  for (const auto& lv : tc.ladder) {
    if (lv.resolution < 4 || lv.resolution > native_n || lv.epochs < 1)
      throw std::invalid_argument("train: bad ladder level");
    if (!is_power_of_two(lv.resolution) || !is_power_of_two(native_n))
      throw std::invalid_argument("train: ladder resolutions must be dyadic");
  }

  TrainResult res;
  if (warm_start) {
    if (warm_start->theta.size() != param_count(cfg))
      throw std::invalid_argument("train: warm start does not match config");
    res.params = *warm_start;
    res.params.cfg = cfg;
  } else {
    res.params = fno_init(cfg, tc.seed);
  }

  AdamState adam;
  const RngStream root(tc.seed);
  int global_epoch = 0;

  for (std::size_t li = 0; li < tc.ladder.size(); ++li) {
    const int rn = tc.ladder[li].resolution;
    auto level_sampler = [&, rn](RngStream& s) {
      GridField x = native_sampler(s);
      return rn == x.n ? x : project_to_modes(x, rn);
    };
    auto fine_sampler = [&](RngStream& s) { return native_sampler(s); };

    for (int e = 0; e < tc.ladder[li].epochs; ++e) {
      ++global_epoch;
      const auto t_start = std::chrono::steady_clock::now();
      double mean_loss = 0.0;
      for (int st = 0; st < tc.steps_per_epoch; ++st) {
        RngStream step_rng =
            root.fork(0x7472u, li).fork(global_epoch, st);
        DsmResult r = dsm_loss(res.params, level_sampler, prior, sched,
                               tc.batch, step_rng, true);
        adam_step(res.params, r.grad, adam, tc.adam);
        mean_loss += r.loss / tc.steps_per_epoch;
      }
      EpochRecord rec;
      rec.epoch = global_epoch;
      rec.level = static_cast<int>(li);
      rec.resolution = rn;
      rec.train_loss = mean_loss;
      {
        RngStream val_rng = root.fork(0x76616cu, li);
        auto model = [&](double t, const GridField& x) {
          return fno_forward(res.params, t, x);
        };
        rec.val_loss = dsm_loss_of_score(model, level_sampler, prior, sched,
                                         tc.val_batch, val_rng);
        RngStream val_fine = root.fork(0x76616cu, 0xf1e);
        rec.val_loss_fine = dsm_loss_of_score(model, fine_sampler, prior, sched,
                                              tc.val_batch, val_fine);
      }
      const bool level_end = (e + 1 == tc.ladder[li].epochs);
      const bool cadence =
          tc.checkpoint_every > 0 && ((e + 1) % tc.checkpoint_every == 0);
      if (!tc.out_dir.empty() && (level_end || cadence)) {
        rec.checkpoint = tc.out_dir + "/ckpt_level" + std::to_string(rn) +
                         "_epoch" + std::to_string(global_epoch) + ".fno";
        save_checkpoint(res.params, rec.checkpoint);
      }
      rec.wall_sec = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t_start)
                         .count();
      res.log.rows.push_back(std::move(rec));
    }
  }
  if (!tc.out_dir.empty()) {
    save_checkpoint(res.params, tc.out_dir + "/ckpt_final.fno");
    write_run_log(res.log, tc.out_dir + "/runlog.csv");
  }
  return res;
}

}  // namespace tcdiff
