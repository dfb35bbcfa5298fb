#include "tcdiff/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tcdiff/spectral.hpp"

namespace tcdiff {

namespace {
const double kSqrt2 = 1.4142135623730950488;
}

CoordMap make_coord_map(int n) {
  CoordMap map;
  map.n = n;
  for (int si = 0; si < n; ++si) {
    for (int sj = 0; sj < n; ++sj) {
      const int mi = (n - si) % n;
      const int mj = (n - sj) % n;
      const bool self = (mi == si && mj == sj);
      if (!self && (mi < si || (mi == si && mj < sj))) continue;
      map.entries.push_back({si, sj, 0});
      if (!self) map.entries.push_back({si, sj, 1});
    }
  }
  return map;
}

CoordMap make_coord_map(int n, const PriorSpec& spec, double threshold) {
  const auto& lam = eigenvalues(spec, n);
  CoordMap full = make_coord_map(n);
  CoordMap map;
  map.n = n;
  for (const auto& e : full.entries)
    if (lam[static_cast<std::size_t>(e.si) * n + e.sj] > threshold)
      map.entries.push_back(e);
  return map;
}

std::vector<double> to_coords(const CoordMap& map, const GridField& u) {
  if (u.n != map.n) throw std::invalid_argument("to_coords: resolution mismatch");
  const SpectralCoeffs c = dft2(u);
  std::vector<double> z(map.entries.size());
  for (std::size_t j = 0; j < map.entries.size(); ++j) {
    const auto& e = map.entries[j];
    const std::complex<double> v = c.at_slot(e.si, e.sj);
    const int mi = (map.n - e.si) % map.n;
    const int mj = (map.n - e.sj) % map.n;
    const bool self = (mi == e.si && mj == e.sj);
    if (self)
      z[j] = v.real();
    else
      z[j] = e.part == 0 ? kSqrt2 * v.real() : -kSqrt2 * v.imag();
  }
  return z;
}

GridField from_coords(const CoordMap& map, const std::vector<double>& z) {
  if (z.size() != map.entries.size())
    throw std::invalid_argument("from_coords: size mismatch");
  SpectralCoeffs c(map.n);
  for (std::size_t j = 0; j < map.entries.size(); ++j) {
    const auto& e = map.entries[j];
    const int mi = (map.n - e.si) % map.n;
    const int mj = (map.n - e.sj) % map.n;
    const bool self = (mi == e.si && mj == e.sj);
    if (self) {
      c.at_slot(e.si, e.sj) = z[j];
    } else if (e.part == 0) {
      c.at_slot(e.si, e.sj) += z[j] / kSqrt2;
      c.at_slot(mi, mj) += z[j] / kSqrt2;
    } else {
      c.at_slot(e.si, e.sj) += std::complex<double>(0.0, -z[j] / kSqrt2);
      c.at_slot(mi, mj) += std::complex<double>(0.0, z[j] / kSqrt2);
    }
  }
  return idft2(c);
}

std::vector<double> coord_eigenvalues(const CoordMap& map, const PriorSpec& spec) {
  const auto& lam = eigenvalues(spec, map.n);
  std::vector<double> out(map.entries.size());
  for (std::size_t j = 0; j < map.entries.size(); ++j)
    out[j] = lam[static_cast<std::size_t>(map.entries[j].si) * map.n +
                 map.entries[j].sj];
  return out;
}

GridField gaussian_score(const GaussianData& data, const PriorSpec& q,
                         const Schedule& sched, double t, const GridField& x) {
  if (t <= 0.0)
    throw std::domain_error("gaussian_score: singular at t = 0");
  if (t > sched.T) throw std::invalid_argument("gaussian_score: t > T");
  if (x.n != data.mean.n || data.p.size() != x.size())
    throw std::invalid_argument("gaussian_score: resolution mismatch");
  const auto& lam = eigenvalues(q, x.n);
  const double ab = abar_t(sched, t);
  const double bt = btilde_t(sched, t);
  const SpectralCoeffs xc = dft2(x);
  const SpectralCoeffs mc = dft2(data.mean);
  SpectralCoeffs out(x.n);
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    const double l = lam[i];
    if (l <= 0.0) continue;
    const double denom = ab * ab * data.p[i] + bt * l;
    out.c[i] = -(l / denom) * (xc.c[i] - ab * mc.c[i]);
  }
  return idft2(out);
}

namespace {

double null_space_energy(const SpectralCoeffs& xc, const std::vector<double>& lam) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xc.c.size(); ++i)
    if (lam[i] <= 0.0) acc += std::norm(xc.c[i]);
  return acc;
}

std::vector<double> mixture_log_weights(const std::vector<SpectralCoeffs>& mcs,
                                        const SpectralCoeffs& xc,
                                        const std::vector<double>& lam,
                                        double ab, double c) {
  std::vector<double> logw(mcs.size());
  for (std::size_t i = 0; i < mcs.size(); ++i) {
    double q = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      if (lam[k] <= 0.0) continue;
      q += std::norm(xc.c[k] - ab * mcs[i].c[k]) / lam[k];
    }
    logw[i] = -0.5 * q / c;
  }
  const double mx = *std::max_element(logw.begin(), logw.end());
  double tot = 0.0;
  for (double& lw : logw) tot += std::exp(lw - mx);
  const double log_tot = mx + std::log(tot);
  for (double& lw : logw) lw -= log_tot;
  return logw;
}

}  // namespace

std::vector<double> gmm_weights(const GmmData& data, const PriorSpec& q,
                                const Schedule& sched, double t,
                                const GridField& x, double support_tol) {
  if (data.means.empty()) throw std::invalid_argument("gmm: no components");
  if (t < 0.0 || t > sched.T) throw std::invalid_argument("gmm: t outside [0, T]");
  for (const auto& m : data.means)
    if (m.n != x.n) throw std::invalid_argument("gmm: mean resolution mismatch");
  const auto& lam = eigenvalues(q, x.n);
  const SpectralCoeffs xc = dft2(x);
  if (null_space_energy(xc, lam) > support_tol)
    throw std::domain_error("gmm: state has energy outside the prior support");
  const double ab = abar_t(sched, t);
  const double c = btilde_t(sched, t) + ab * ab;
  std::vector<SpectralCoeffs> mcs;
  mcs.reserve(data.means.size());
  for (const auto& m : data.means) mcs.push_back(dft2(m));
  std::vector<double> logw = mixture_log_weights(mcs, xc, lam, ab, c);
  std::vector<double> w(logw.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(logw[i]);
  return w;
}

GridField gmm_score(const GmmData& data, const PriorSpec& q,
                    const Schedule& sched, double t, const GridField& x,
                    double support_tol) {
  const std::vector<double> w = gmm_weights(data, q, sched, t, x, support_tol);
  const auto& lam = eigenvalues(q, x.n);
  const double ab = abar_t(sched, t);
  const double c = btilde_t(sched, t) + ab * ab;
  const SpectralCoeffs xc = dft2(x);
  SpectralCoeffs mbar(x.n);
  for (std::size_t i = 0; i < data.means.size(); ++i) {
    const SpectralCoeffs mc = dft2(data.means[i]);
    for (std::size_t k = 0; k < mbar.c.size(); ++k) mbar.c[k] += w[i] * mc.c[k];
  }
  SpectralCoeffs out(x.n);
  for (std::size_t k = 0; k < out.c.size(); ++k) {
    if (lam[k] <= 0.0) continue;
    out.c[k] = -(xc.c[k] - ab * mbar.c[k]) / c;
  }
  return idft2(out);
}

OracleResult brute_force_score_oracle(
    const std::function<std::vector<double>(RngStream&)>& sample_z0,
    const std::vector<double>& lambda, const Schedule& sched, double t,
    const std::vector<double>& z, int n_mc, RngStream& rng) {
  if (t <= 0.0) throw std::domain_error("oracle: requires t > 0");
  if (z.size() != lambda.size())
    throw std::invalid_argument("oracle: dimension mismatch");
  for (double l : lambda)
    if (l <= 0.0) throw std::invalid_argument("oracle: lambda must be positive");
  if (n_mc < 1) throw std::invalid_argument("oracle: n_mc < 1");
  const double a = a_t(sched, t);
  const double kappa = 1.0 / (a * a - 1.0);
  const std::size_t d = z.size();

  std::vector<double> logw(n_mc);
  std::vector<std::vector<double>> diffs(n_mc);
  for (int i = 0; i < n_mc; ++i) {
    RngStream s = rng.fork(i);
    std::vector<double> z0 = sample_z0(s);
    if (z0.size() != d) throw std::invalid_argument("oracle: sampler dimension");
    std::vector<double> diff(d);
    double q = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      diff[k] = a * z[k] - z0[k];
      q += diff[k] * diff[k] / lambda[k];
    }
    logw[i] = -0.5 * kappa * q;
    diffs[i] = std::move(diff);
  }
  const double mx = *std::max_element(logw.begin(), logw.end());
  double wsum = 0.0, wsq = 0.0;
  std::vector<double> num(d, 0.0);
  for (int i = 0; i < n_mc; ++i) {
    const double w = std::exp(logw[i] - mx);
    wsum += w;
    wsq += w * w;
    for (std::size_t k = 0; k < d; ++k) num[k] += w * diffs[i][k];
  }
  OracleResult out;
  out.ess = (wsum * wsum / wsq) / n_mc;
  out.score.resize(d);
  for (std::size_t k = 0; k < d; ++k)
    out.score[k] = -a * kappa / lambda[k] * (num[k] / wsum);
  return out;
}

}  // namespace tcdiff
