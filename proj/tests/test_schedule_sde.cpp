#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "tcdiff/prior.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/sde.hpp"
#include "tcdiff/schedule.hpp"
#include "tcdiff/spectral.hpp"

using namespace tcdiff;

namespace {

PriorSpec bessel_prior() {
  PriorSpec s;
  s.kind = PriorKind::Bessel;
  s.gamma2 = 8.0;
  s.power = 1.1;
  return s;
}

double simpson_int_alpha(const Schedule& s, double t, int n = 4000) {
  double acc = alpha_t(s, 0.0) + alpha_t(s, t);
  for (int i = 1; i < n; ++i)
    acc += (i % 2 ? 4.0 : 2.0) * alpha_t(s, t * i / n);
  return acc * t / (3.0 * n);
}

}  // namespace

TEST_SUITE("sde") {

TEST_CASE("closed-form integral matches quadrature") {
  const Schedule s{0.1, 20.0, 1.0};
  for (double t : {0.0, 0.05, 0.3, 0.77, 1.0})
    CHECK(int_alpha(s, t) == doctest::Approx(simpson_int_alpha(s, t)).epsilon(1e-10));
  const Schedule odd{0.4, 3.0, 2.5};
  CHECK(int_alpha(odd, 1.7) == doctest::Approx(simpson_int_alpha(odd, 1.7)).epsilon(1e-10));
}

TEST_CASE("constant schedule reduces to scalar OU formulas") {
  const Schedule s{2.0, 2.0, 1.0};
  for (double t : {0.1, 0.5, 1.0}) {
    CHECK(int_alpha(s, t) == doctest::Approx(2.0 * t).epsilon(1e-12));
    CHECK(a_t(s, t) == doctest::Approx(std::exp(t)).epsilon(1e-12));
    CHECK(btilde_t(s, t) == doctest::Approx(1.0 - std::exp(-2.0 * t)).epsilon(1e-12));
  }
}

TEST_CASE("schedule identities") {
  const Schedule s{0.1, 20.0, 1.0};
  for (double t : {0.0, 0.2, 0.6, 1.0}) {
    CHECK(a_t(s, t) * abar_t(s, t) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(btilde_t(s, t) ==
          doctest::Approx(1.0 - abar_t(s, t) * abar_t(s, t)).epsilon(1e-12));
    CHECK(g_t(s, t) == doctest::Approx(std::sqrt(alpha_t(s, t))).epsilon(1e-12));
    // a^2 btilde = a^2 - 1, the cancellation behind the conditional score
    const double a = a_t(s, t);
    CHECK(a * a * btilde_t(s, t) == doctest::Approx(a * a - 1.0).epsilon(1e-10));
  }
  CHECK(btilde_t(s, 0.0) == 0.0);
  CHECK(abar_t(s, 0.0) == 1.0);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(validate(Schedule{0.1, 20.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Schedule{0.1, 20.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Schedule{5.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(Schedule{-0.1, 1.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(Schedule{0.0, 0.0, 1.0}));
  CHECK_NOTHROW(validate(Schedule{0.1, 20.0, 1.0}));
}

TEST_CASE("forward sample at t = 0 returns the initial condition") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  RngStream rng(41);
  GridField x0(8);
  for (auto& v : x0.v) v = rng.normal();
  RngStream draw(42);
  const ForwardDraw fd = forward_sample(x0, 0.0, s, prior, draw);
  for (std::size_t q = 0; q < x0.size(); ++q) CHECK(fd.xt.v[q] == x0.v[q]);
  CHECK(norm2(fd.eta) > 0.0);  // the noise draw itself is still produced
}

TEST_CASE("forward sample rejects out-of-range times") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  GridField x0(8);
  RngStream rng(1);
  CHECK_THROWS_AS(forward_sample(x0, -0.01, s, prior, rng), std::invalid_argument);
  CHECK_THROWS_AS(forward_sample(x0, 1.01, s, prior, rng), std::invalid_argument);
}

TEST_CASE("forward marginals match the closed form per mode") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  const int n = 16, draws = 4000;
  const double t = 0.4;
  GridField x0(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      x0.v[static_cast<std::size_t>(i) * n + j] =
          std::sin(2.0 * M_PI * i / n) + 0.3 * std::cos(2.0 * M_PI * j / n);
  const std::complex<double> c0 = dft2(x0).at_freq(1, 0);
  RngStream root(0x5de);
  std::complex<double> mean = 0.0;
  double msq = 0.0;
  for (int i = 0; i < draws; ++i) {
    RngStream rr = root.fork(i);
    const ForwardDraw fd = forward_sample(x0, t, s, prior, rr);
    const std::complex<double> c = dft2(fd.xt).at_freq(1, 0);
    mean += c / static_cast<double>(draws);
    msq += std::norm(c) / draws;
  }
  const double ab = abar_t(s, t), bt = btilde_t(s, t);
  const double lam = eigenvalue(prior, 1, 0, n);
  const double var_exact = bt * lam;
  // complex mean has per-draw variance var_exact, spread over draws
  CHECK(std::abs(mean - ab * c0) < 4.0 * std::sqrt(var_exact / draws));
  const double var_mc = msq - std::norm(mean);
  CHECK(var_mc == doctest::Approx(var_exact).epsilon(4.0 * std::sqrt(2.0 / draws)));
}

TEST_CASE("frozen flow: zero schedule and zero score leave y0 alone") {
  const Schedule s{0.0, 0.0, 1.0};
  const PriorSpec prior = bessel_prior();
  GridField y0(8);
  RngStream rng(9);
  for (auto& v : y0.v) v = rng.normal();
  ReverseConfig cfg;
  cfg.steps = 17;
  const ScoreFn zero = [](double, const GridField& y) {
    GridField z(y.n);
    return z;
  };
  RngStream path(10);
  const GridField yT = reverse_euler_maruyama(zero, y0, s, prior, cfg, path);
  for (std::size_t q = 0; q < y0.size(); ++q)
    CHECK(yT.v[q] == doctest::Approx(y0.v[q]).epsilon(1e-12));
}

TEST_CASE("reverse sampler smoke run stays finite") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  const int n = 16;
  // the exact score for data ~ N(0, Q) (so p_k = lambda_k)
  const ScoreFn score = [&](double t, const GridField& y) {
    GridField out = y;
    const double ab = abar_t(s, t), bt = btilde_t(s, t);
    const double denom_scale = ab * ab + bt;
    out *= -g_t(s, t) / denom_scale;
    return out;
  };
  RngStream rng(11);
  GridField y0 = sample_prior(prior, n, rng);
  ReverseConfig cfg;
  cfg.steps = 60;
  RngStream path(12);
  const GridField yd = reverse_euler_maruyama(score, y0, s, prior, cfg, path);
  CHECK(std::isfinite(norm2(yd)));
  CHECK(norm2(yd) < 100.0 * trace_at(prior, n));
}

TEST_CASE("reverse sampler validates its configuration") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  GridField y0(8);
  const ScoreFn zero = [](double, const GridField& y) { return GridField(y.n); };
  RngStream rng(1);
  ReverseConfig bad;
  bad.steps = 0;
  CHECK_THROWS_AS(reverse_euler_maruyama(zero, y0, s, prior, bad, rng),
                  std::invalid_argument);
  bad.steps = 10;
  bad.delta = 2.0;
  CHECK_THROWS_AS(reverse_euler_maruyama(zero, y0, s, prior, bad, rng),
                  std::invalid_argument);
}

TEST_CASE("truncation identity holds for a point mass") {
  const Schedule s{0.1, 20.0, 1.0};
  const PriorSpec prior = bessel_prior();
  const int nf = 32, nc = 8;
  GridField m(nf);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j)
      m.v[static_cast<std::size_t>(i) * nf + j] =
          std::sin(2.0 * M_PI * (3.0 * i + j) / nf);
  const GridField x0 = apply_sqrt(prior, m);
  GridField diff = x0;
  diff -= upsample_to(project_to_modes(x0, nc), nf);
  const double data_term = norm2(diff);
  const auto sampler = [&](RngStream&) { return x0; };
  RngStream rng(0x7eca);
  const TruncationCheck chk =
      forward_truncation_error(sampler, data_term, nc, 0.5, s, prior, 3000, rng);
  CHECK(std::abs(chk.lhs_mc - chk.rhs_exact) < 4.0 * chk.se);
  CHECK(chk.rhs_exact > 0.0);
  CHECK(chk.se > 0.0);
  CHECK(chk.se < 0.05 * chk.rhs_exact);
}

}  // TEST_SUITE
