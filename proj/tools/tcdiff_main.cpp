#include <cstdio>
#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "criteria.hpp"
#include "tcdiff/analytic.hpp"
#include "tcdiff/config.hpp"
#include "tcdiff/data.hpp"
#include "tcdiff/fno.hpp"
#include "tcdiff/metrics.hpp"
#include "tcdiff/png_io.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/sde.hpp"
#include "tcdiff/training.hpp"

namespace {

using namespace tcdiff;

RunConfig load_config(const std::string& path) {
  RunConfig rc = path.empty() ? RunConfig{} : parse_config_file(path);
  validate(rc.prior);
  validate(rc.schedule);
  validate(rc.fno);
  return rc;
}

struct Dataset {
  FieldSampler sampler;
  int native_n = 0;
  bool analytic = false;  // gmm: the reference score is available
  GmmData gmm;
};

Dataset make_dataset(const RunConfig& rc) {
  Dataset d;
  d.native_n = rc.dataset.native_resolution;
  if (rc.dataset.kind == "gmm") {
    d.analytic = true;
    d.gmm = make_two_ramp_gmm(rc.prior, d.native_n);
    const PriorSpec prior = rc.prior;
    const GmmData gmm = d.gmm;
    const int n = d.native_n;
    d.sampler = [prior, gmm, n](RngStream& s) {
      return gmm.means[s.uniform_index(gmm.means.size())] +
             sample_prior(prior, n, s);
    };
  } else if (rc.dataset.kind == "mnist") {
    if (rc.dataset.mnist_images.empty())
      throw std::runtime_error("mnist dataset needs dataset.mnist_images");
    auto set = std::make_shared<SampleSet>(
        load_mnist_idx(rc.dataset.mnist_images, rc.dataset.limit));
    if (set->n != d.native_n)
      set = std::make_shared<SampleSet>(condition_resolution(*set, d.native_n));
    d.sampler = [set](RngStream& s) {
      return set->fields[s.uniform_index(set->fields.size())];
    };
  } else {
    throw std::runtime_error("unknown dataset kind: " + rc.dataset.kind);
  }
  return d;
}

void ensure_outdir(const RunConfig& rc) {
  if (!rc.outdir.empty()) std::filesystem::create_directories(rc.outdir);
}

int cmd_print_config(const std::string& config_path) {
  const RunConfig rc = load_config(config_path);
  std::printf("%s", serialize_config(rc).c_str());
  return 0;
}

int cmd_sample_prior(const std::string& config_path, int count, int resolution,
                     std::uint64_t seed) {
  RunConfig rc = load_config(config_path);
  if (count > 0) rc.sample.count = count;
  if (resolution > 0) rc.sample.resolution = resolution;
  if (seed) rc.seed = seed;
  const int n = rc.sample.resolution > 0 ? rc.sample.resolution
                                         : rc.dataset.native_resolution;
  ensure_outdir(rc);
  SampleSet set{n, Provenance::Generated, {}};
  RngStream root(rc.seed);
  for (int i = 0; i < rc.sample.count; ++i) {
    RngStream s = root.fork(i);
    set.fields.push_back(sample_prior(rc.prior, n, s));
  }
  const std::string base = rc.outdir + "/prior_res" + std::to_string(n);
  save_sample_set(set, base + ".tcfs");
  write_field_montage(base + ".png", set.fields);
  std::printf("wrote %s.png and %s.tcfs (%d draws, trace %.6g)\n", base.c_str(),
              base.c_str(), rc.sample.count, trace_at(rc.prior, n));
  return 0;
}

int cmd_train(const std::string& config_path) {
  RunConfig rc = load_config(config_path);
  const Dataset data = make_dataset(rc);
  ensure_outdir(rc);
  TrainConfig tc = rc.train;
  tc.seed = rc.seed;
  tc.out_dir = rc.outdir;
  if (tc.ladder.empty())
    tc.ladder = {{data.native_n, 10}};
  const TrainResult res =
      train(rc.fno, tc, data.sampler, data.native_n, rc.prior, rc.schedule);
  for (const auto& row : res.log.rows)
    std::printf("epoch %3d res %3d train %.6f val %.6f val_fine %.6f %.1fs\n",
                row.epoch, row.resolution, row.train_loss, row.val_loss,
                row.val_loss_fine, row.wall_sec);
  std::printf("final checkpoint: %s/ckpt_final.fno\n", rc.outdir.c_str());
  return 0;
}

int cmd_generate(const std::string& config_path, const std::string& ckpt,
                 int count, int resolution) {
  RunConfig rc = load_config(config_path);
  if (count > 0) rc.sample.count = count;
  if (resolution > 0) rc.sample.resolution = resolution;
  const FnoParams params = load_checkpoint(
      ckpt.empty() ? rc.outdir + "/ckpt_final.fno" : ckpt);
  const int n = rc.sample.resolution > 0 ? rc.sample.resolution
                                         : rc.dataset.native_resolution;
  ensure_outdir(rc);
  ScoreFn score = [&params](double t, const GridField& x) {
    return fno_forward(params, t, x);
  };
  ReverseConfig rcfg;
  rcfg.steps = rc.sample.steps;
  rcfg.delta = rc.sample.delta;
  SampleSet set{n, Provenance::Generated, {}};
  RngStream root(rc.seed);
  for (int i = 0; i < rc.sample.count; ++i) {
    RngStream s = root.fork(0x67656eu, i);
    const GridField y0 = sample_prior(rc.prior, n, s);
    set.fields.push_back(
        reverse_euler_maruyama(score, y0, rc.schedule, rc.prior, rcfg, s));
  }
  const std::string base = rc.outdir + "/samples_res" + std::to_string(n);
  save_sample_set(set, base + ".tcfs");
  write_field_montage(base + ".png", set.fields);
  std::printf("wrote %s.png and %s.tcfs (%d samples, %d steps)\n", base.c_str(),
              base.c_str(), rc.sample.count, rcfg.steps);
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& ckpt,
             int batch) {
  RunConfig rc = load_config(config_path);
  const Dataset data = make_dataset(rc);
  const FnoParams params = load_checkpoint(
      ckpt.empty() ? rc.outdir + "/ckpt_final.fno" : ckpt);
  if (batch <= 0) batch = rc.train.val_batch;
  RngStream v(rc.seed ^ 0xEA11u);
  const double loss =
      dsm_loss(params, data.sampler, rc.prior, rc.schedule, batch, v, false)
          .loss;
  std::printf("val dsm loss (%d draws at %d): %.6f\n", batch, data.native_n,
              loss);
  if (data.analytic) {
    const PriorSpec prior = rc.prior;
    const Schedule sched = rc.schedule;
    const GmmData gmm = data.gmm;
    auto model = [&params](double t, const GridField& x) {
      return fno_forward(params, t, x);
    };
    auto ref = [prior, sched, gmm](double t, const GridField& x) {
      GridField s = gmm_score(gmm, prior, sched, t, x);
      s *= g_t(sched, t);
      return s;
    };
    auto sample_t = [&sched](RngStream& s) {
      return s.uniform(0.05, sched.T);
    };
    RngStream e(rc.seed ^ 0x5c0eu);
    const ScoreErrorResult se = score_error(model, ref, data.sampler, prior,
                                            sched, sample_t, batch, e);
    std::printf("score error vs analytic mixture: abs %.6g rel %.6g\n",
                se.abs_sq, se.rel_sq);
  }
  return 0;
}

int cmd_verify(int criterion, bool slow, const std::string& mnist) {
  accept::AcceptOptions opts;
  opts.slow = slow;
  opts.mnist_dir = mnist;
  int failures = 0;
  auto report = [&](const accept::CriterionResult& r) {
    std::printf("%s\n", accept::format_result(r).c_str());
    std::fflush(stdout);
    if (!r.pass && !r.skipped) ++failures;
  };
  if (criterion > 0) {
    report(accept::run_criterion(criterion, opts));
  } else {
    for (int id = 1; id <= accept::criterion_count(); ++id)
      report(accept::run_criterion(id, opts));
  }
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trace-class diffusion models on function space"};
  app.require_subcommand(1);
  std::string config_path, ckpt, mnist;
  int count = 0, resolution = 0, batch = 0, criterion = 0;
  std::uint64_t seed = 0;
  bool slow = false;

  auto* p_cfg = app.add_subcommand("print-config",
                                   "print the canonical config (defaults or a "
                                   "loaded file)");
  p_cfg->add_option("--config", config_path, "config file");

  auto* p_prior = app.add_subcommand("sample-prior",
                                     "draw prior fields, write png + tcfs");
  p_prior->add_option("--config", config_path, "config file");
  p_prior->add_option("--count", count, "number of draws");
  p_prior->add_option("--resolution", resolution, "grid resolution");
  p_prior->add_option("--seed", seed, "rng seed");

  auto* p_train = app.add_subcommand("train", "train the score network");
  p_train->add_option("--config", config_path, "config file")->required();

  auto* p_gen = app.add_subcommand("generate",
                                   "reverse-sample fields from a checkpoint");
  p_gen->add_option("--config", config_path, "config file")->required();
  p_gen->add_option("--checkpoint", ckpt, "checkpoint (default outdir/ckpt_final.fno)");
  p_gen->add_option("--count", count, "number of samples");
  p_gen->add_option("--resolution", resolution, "generation resolution");

  auto* p_eval = app.add_subcommand("eval", "validation loss and score error");
  p_eval->add_option("--config", config_path, "config file")->required();
  p_eval->add_option("--checkpoint", ckpt, "checkpoint path");
  p_eval->add_option("--batch", batch, "evaluation batch size");

  auto* p_verify = app.add_subcommand("verify", "run the acceptance criteria");
  p_verify->add_option("--criterion", criterion, "single criterion (1..10)");
  p_verify->add_flag("--slow", slow, "enable the long image criterion");
  p_verify->add_option("--mnist", mnist, "IDX image directory");

  CLI11_PARSE(app, argc, argv);
  try {
    if (p_cfg->parsed()) return cmd_print_config(config_path);
    if (p_prior->parsed()) return cmd_sample_prior(config_path, count, resolution, seed);
    if (p_train->parsed()) return cmd_train(config_path);
    if (p_gen->parsed()) return cmd_generate(config_path, ckpt, count, resolution);
    if (p_eval->parsed()) return cmd_eval(config_path, ckpt, batch);
    if (p_verify->parsed()) return cmd_verify(criterion, slow, mnist);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
