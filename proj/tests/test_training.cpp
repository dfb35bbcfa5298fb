#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "tcdiff/analytic.hpp"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/training.hpp"

using namespace tcdiff;

namespace {

PriorSpec bessel_prior() {
  PriorSpec s;
  s.kind = PriorKind::Bessel;
  s.gamma2 = 8.0;
  s.power = 1.1;
  return s;
}

FnoConfig tiny_cfg() {
  FnoConfig c;
  c.layers = 1;
  c.width = 2;
  c.modes1 = 1;
  c.modes2 = 1;
  return c;
}

FieldSampler gaussian_sampler(const PriorSpec& prior, int n) {
  return [prior, n](RngStream& s) {
    GridField x = sample_prior(prior, n, s);
    x *= std::sqrt(0.5);  // data covariance 0.5 Q
    return x;
  };
}

}  // namespace

TEST_SUITE("training") {

TEST_CASE("adam minimizes a separable quadratic deterministically") {
  const std::vector<double> target = {1.0, -2.0, 0.5, 3.0};
  FnoParams p;
  p.theta.assign(target.size(), 0.0);
  AdamState st;
  AdamConfig cfg;
  cfg.lr = 0.05;
  for (int it = 0; it < 2000; ++it) {
    std::vector<double> g(target.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = p.theta[i] - target[i];
    adam_step(p, g, st, cfg);
  }
  for (std::size_t i = 0; i < target.size(); ++i)
    CHECK(p.theta[i] == doctest::Approx(target[i]).epsilon(1e-4));
  CHECK(st.step == 2000);

  // bit-for-bit repeatability
  FnoParams q;
  q.theta.assign(target.size(), 0.0);
  AdamState st2;
  for (int it = 0; it < 50; ++it) {
    std::vector<double> g(target.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = q.theta[i] - target[i];
    adam_step(q, g, st2, cfg);
  }
  FnoParams r;
  r.theta.assign(target.size(), 0.0);
  AdamState st3;
  for (int it = 0; it < 50; ++it) {
    std::vector<double> g(target.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = r.theta[i] - target[i];
    adam_step(r, g, st3, cfg);
  }
  CHECK(q.theta == r.theta);
}

TEST_CASE("adam rejects mismatched buffers") {
  FnoParams p;
  p.theta = {0.0, 0.0};
  AdamState st;
  AdamConfig cfg;
  CHECK_THROWS_AS(adam_step(p, {1.0}, st, cfg), std::invalid_argument);
  adam_step(p, {1.0, 1.0}, st, cfg);
  p.theta.push_back(0.0);
  CHECK_THROWS_AS(adam_step(p, {1.0, 1.0, 1.0}, st, cfg), std::invalid_argument);
}

TEST_CASE("dsm loss is reproducible and grad-independent") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const FnoParams p = fno_init(tiny_cfg(), 71);
  const FieldSampler data = gaussian_sampler(prior, 8);
  RngStream r1(100), r2(100), r3(100);
  const DsmResult a = dsm_loss(p, data, prior, sched, 6, r1, true);
  const DsmResult b = dsm_loss(p, data, prior, sched, 6, r2, true);
  const DsmResult c = dsm_loss(p, data, prior, sched, 6, r3, false);
  CHECK(a.loss == b.loss);
  CHECK(a.grad == b.grad);
  CHECK(a.loss == c.loss);
  CHECK(c.grad.empty());
  RngStream r4(101);
  const DsmResult d = dsm_loss(p, data, prior, sched, 6, r4, false);
  CHECK(d.loss != a.loss);
}

TEST_CASE("dsm gradient matches finite differences") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const FnoParams p = fno_init(tiny_cfg(), 72);
  const FieldSampler data = gaussian_sampler(prior, 8);
  const std::uint64_t seed = 0x5eed;
  const auto loss_at = [&](const FnoParams& q) {
    RngStream r(seed);  // fresh stream, identical draws every call
    return dsm_loss(q, data, prior, sched, 4, r, false).loss;
  };
  RngStream rg(seed);
  const DsmResult res = dsm_loss(p, data, prior, sched, 4, rg, true);
  CHECK(res.loss == doctest::Approx(loss_at(p)).epsilon(1e-14));
  RngStream pick(73);
  double gmax = 0.0;
  for (double g : res.grad) gmax = std::max(gmax, std::abs(g));
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t i = pick.uniform_index(p.theta.size());
    FnoParams q = p;
    const double h = 1e-6 * std::max(1.0, std::abs(p.theta[i]));
    q.theta[i] = p.theta[i] + h;
    const double jp = loss_at(q);
    q.theta[i] = p.theta[i] - h;
    const double jm = loss_at(q);
    const double fd = (jp - jm) / (2.0 * h);
    CHECK(std::abs(fd - res.grad[i]) <
          1e-4 * std::max({std::abs(fd), std::abs(res.grad[i]), 1e-3 * gmax}));
  }
}

TEST_CASE("the zero score scores the noise energy") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const int n = 16;
  const FieldSampler data = gaussian_sampler(prior, n);
  const ScoreFn zero = [](double, const GridField& x) { return GridField(x.n); };
  RngStream rng(74);
  const double loss = dsm_loss_of_score(zero, data, prior, sched, 500, rng);
  // E||eta||^2 = tr Q at any t, so the weighted loss of s = 0 is the trace
  CHECK(loss == doctest::Approx(trace_at(prior, n)).epsilon(0.15));
}

TEST_CASE("the analytic optimum beats zero and detuned scores") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const int n = 8;
  const FieldSampler data = gaussian_sampler(prior, n);
  GaussianData gd;
  gd.mean = GridField(n);
  gd.p = eigenvalues(prior, n);
  for (double& v : gd.p) v *= 0.5;
  const ScoreFn best = [&](double t, const GridField& x) {
    GridField s = gaussian_score(gd, prior, sched, t, x);
    s *= g_t(sched, t);
    return s;
  };
  const ScoreFn zero = [](double, const GridField& x) { return GridField(x.n); };
  const ScoreFn detuned = [&](double t, const GridField& x) {
    GridField s = best(t, x);
    s *= 1.5;
    return s;
  };
  const std::uint64_t seed = 1234;
  RngStream a(seed), b(seed), c(seed);
  const double l_best = dsm_loss_of_score(best, data, prior, sched, 300, a);
  const double l_zero = dsm_loss_of_score(zero, data, prior, sched, 300, b);
  const double l_detuned = dsm_loss_of_score(detuned, data, prior, sched, 300, c);
  CHECK(l_best < l_zero);
  CHECK(l_best < l_detuned);
}

TEST_CASE("dsm input validation") {
  const PriorSpec prior = bessel_prior();
  const FnoParams p = fno_init(tiny_cfg(), 75);
  const FieldSampler data = gaussian_sampler(prior, 8);
  RngStream rng(76);
  CHECK_THROWS_AS(dsm_loss(p, data, prior, Schedule{0.1, 20.0, 1.0}, 0, rng, false),
                  std::invalid_argument);
  // the weight 1/g_t blows up if alpha can vanish
  CHECK_THROWS_AS(dsm_loss(p, data, prior, Schedule{0.0, 20.0, 1.0}, 2, rng, false),
                  std::invalid_argument);
}

TEST_CASE("coarse-to-fine training runs, logs and checkpoints") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const int native = 16;
  const FieldSampler data = gaussian_sampler(prior, native);
  FnoConfig cfg = tiny_cfg();
  cfg.width = 3;
  TrainConfig tc;
  tc.ladder = {{8, 2}, {16, 1}};
  tc.batch = 3;
  tc.steps_per_epoch = 2;
  tc.val_batch = 3;
  tc.seed = 99;
  const std::string dir = "train_smoke_out";
  std::filesystem::create_directories(dir);
  tc.out_dir = dir;
  const TrainResult res = train(cfg, tc, data, native, prior, sched);
  REQUIRE(res.log.rows.size() == 3);
  CHECK(res.log.rows[0].resolution == 8);
  CHECK(res.log.rows[1].resolution == 8);
  CHECK(res.log.rows[2].resolution == 16);
  CHECK(res.log.rows[0].epoch == 1);
  CHECK(res.log.rows[2].epoch == 3);
  CHECK(res.log.rows[2].level == 1);
  for (const auto& r : res.log.rows) {
    CHECK(std::isfinite(r.train_loss));
    CHECK(std::isfinite(r.val_loss));
    CHECK(std::isfinite(r.val_loss_fine));
    CHECK(r.wall_sec >= 0.0);
  }
  // level-end checkpoints plus the final snapshot
  CHECK(!res.log.rows[1].checkpoint.empty());
  CHECK(res.log.rows[0].checkpoint.empty());
  CHECK(!res.log.rows[2].checkpoint.empty());
  const FnoParams final_ckpt = load_checkpoint(dir + "/ckpt_final.fno");
  CHECK(final_ckpt.theta == res.params.theta);
  std::ifstream log(dir + "/runlog.csv");
  REQUIRE(log.good());
  std::string header;
  std::getline(log, header);
  CHECK(header ==
        "epoch,level,resolution,train_loss,val_loss,val_loss_fine,wall_sec,"
        "checkpoint");
  int rows = 0;
  for (std::string line; std::getline(log, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 3);

  // determinism: the same config reproduces the same parameters
  TrainConfig tc2 = tc;
  tc2.out_dir.clear();
  const TrainResult res2 = train(cfg, tc2, data, native, prior, sched);
  CHECK(res2.params.theta == res.params.theta);

  // warm start continues from the given parameters
  const TrainResult res3 =
      train(cfg, tc2, data, native, prior, sched, res.params);
  CHECK(res3.params.theta != res.params.theta);
  std::filesystem::remove_all(dir);
}

TEST_CASE("train validates the ladder and warm start") {
  const PriorSpec prior = bessel_prior();
  const Schedule sched{0.1, 20.0, 1.0};
  const FieldSampler data = gaussian_sampler(prior, 16);
  const FnoConfig cfg = tiny_cfg();
  TrainConfig tc;
  tc.batch = 2;
  tc.steps_per_epoch = 1;
  tc.val_batch = 2;
  tc.ladder = {};
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched), std::invalid_argument);
  tc.ladder = {{2, 1}};
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched), std::invalid_argument);
  tc.ladder = {{12, 1}};
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched), std::invalid_argument);
  tc.ladder = {{32, 1}};
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched), std::invalid_argument);
  tc.ladder = {{8, 0}};
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched), std::invalid_argument);
  tc.ladder = {{8, 1}};
  FnoConfig other = cfg;
  other.width = 5;
  const FnoParams wrong = fno_init(other, 1);
  CHECK_THROWS_AS(train(cfg, tc, data, 16, prior, sched, wrong),
                  std::invalid_argument);
}

}  // TEST_SUITE
