#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tcdiff/fno.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/schedule.hpp"
#include "tcdiff/sde.hpp"

namespace tcdiff {

using FieldSampler = std::function<GridField(RngStream&)>;

// Weighted denoising score matching: with (x0, t, eta) drawn per sample,
// x_t = abar x0 + sqrt(btilde) eta, the per-sample loss is
//   || sqrt(btilde_t)/g_t * s_theta(t, x_t) + eta ||^2
// under the grid norm. Its minimizer over s is g_t Q grad log p_t. Each batch
// element uses rng.fork(i), so the batch is reproducible elementwise.
struct DsmResult {
  double loss = 0.0;
  std::vector<double> grad;
};

DsmResult dsm_loss(const FnoParams& params, const FieldSampler& sample_x0,
                   const PriorSpec& prior, const Schedule& sched, int batch,
                   RngStream& rng, bool want_grad);

// Same functional evaluated for an arbitrary score callback (no gradients);
// used for validation losses and for the analytic-optimum loss floor.
double dsm_loss_of_score(const ScoreFn& score, const FieldSampler& sample_x0,
                         const PriorSpec& prior, const Schedule& sched,
                         int batch, RngStream& rng);

struct AdamConfig {
  double lr = 6e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<double> m, v;
  long step = 0;
};

void adam_step(FnoParams& params, const std::vector<double>& grad,
               AdamState& state, const AdamConfig& cfg);

struct LadderLevel {
  int resolution = 0;
  int epochs = 0;
};

struct TrainConfig {
  std::vector<LadderLevel> ladder;
  int batch = 128;
  int steps_per_epoch = 10;  // an epoch is a fixed number of optimizer steps
  AdamConfig adam;
  std::uint64_t seed = 0;
  int val_batch = 64;
  std::string out_dir;        // empty: no checkpoints written
  int checkpoint_every = 0;   // epochs between checkpoints; 0: level ends only
};

struct EpochRecord {
  int epoch = 0;       // global epoch index, 1-based
  int level = 0;       // ladder level index, 0-based
  int resolution = 0;
  double train_loss = 0.0;     // mean over the epoch's optimizer steps
  double val_loss = 0.0;       // fixed validation batch at the level resolution
  double val_loss_fine = 0.0;  // same batch conditioned to the finest resolution
  double wall_sec = 0.0;
  std::string checkpoint;      // path written this epoch, if any
};

struct RunLog {
  std::vector<EpochRecord> rows;
};

// CSV columns: epoch,level,resolution,train_loss,val_loss,val_loss_fine,
// wall_sec,checkpoint
void write_run_log(const RunLog& log, const std::string& path);

struct TrainResult {
  FnoParams params;
  RunLog log;
};

// Coarse-to-fine training. native_sampler draws data at native_n; each ladder
// level projects the draws to the level resolution and runs
// epochs * steps_per_epoch Adam steps. Parameters persist across levels
// (coarse levels engage the subset of spectral weights below their Nyquist),
// so each level warm-starts the next. warm_start, when given, must match cfg.
TrainResult train(const FnoConfig& cfg, const TrainConfig& tc,
                  const FieldSampler& native_sampler, int native_n,
                  const PriorSpec& prior, const Schedule& sched,
                  const std::optional<FnoParams>& warm_start = std::nullopt);

}  // namespace tcdiff
