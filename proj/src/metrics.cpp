#include "tcdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "tcdiff/spectral.hpp"

namespace tcdiff {

namespace {

double quantile_sorted(const std::vector<double>& x, double u) {
  // type-5 empirical quantile: linear interpolation of order statistics at
  // plotting positions (i + 0.5)/n
  const std::size_t n = x.size();
  const double pos = u * n - 0.5;
  if (pos <= 0.0) return x.front();
  if (pos >= static_cast<double>(n - 1)) return x.back();
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * x[lo] + w * x[lo + 1];
}

double w2_1d(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t m = std::min(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(m);
    const double qa = a.size() == m ? a[i] : quantile_sorted(a, u);
    const double qb = b.size() == m ? b[i] : quantile_sorted(b, u);
    acc += (qa - qb) * (qa - qb);
  }
  return std::sqrt(acc / static_cast<double>(m));
}

bool native_projected_mix(Provenance a, Provenance b) {
  auto native_like = [](Provenance p) { return p == Provenance::Native; };
  auto projected_like = [](Provenance p) { return p == Provenance::Projected; };
  return (native_like(a) && projected_like(b)) ||
         (projected_like(a) && native_like(b));
}

}  // namespace

double sliced_wasserstein(const SampleSet& a, const SampleSet& b, int n_proj,
                          RngStream& rng) {
  if (a.fields.empty() || b.fields.empty())
    throw std::invalid_argument("sliced_wasserstein: empty sample set");
  if (a.n != b.n)
    throw std::invalid_argument("sliced_wasserstein: resolution mismatch");
  if (n_proj < 1) throw std::invalid_argument("sliced_wasserstein: n_proj < 1");
  if (native_projected_mix(a.prov, b.prov))
    std::cerr << "[tcdiff] warning: sliced_wasserstein comparing native with "
                 "projected samples; high-frequency content differs by "
                 "construction\n";
  const int n = a.n;
  double acc = 0.0;
  std::vector<double> pa(a.fields.size()), pb(b.fields.size());
  for (int d = 0; d < n_proj; ++d) {
    RngStream s = rng.fork(d);
    GridField dir(n);
    for (auto& v : dir.v) v = s.normal();
    const double nm = field_norm(dir);
    if (nm == 0.0) continue;
    dir *= 1.0 / nm;
    for (std::size_t i = 0; i < a.fields.size(); ++i) pa[i] = inner(a.fields[i], dir);
    for (std::size_t i = 0; i < b.fields.size(); ++i) pb[i] = inner(b.fields[i], dir);
    acc += w2_1d(pa, pb);
  }
  return acc / n_proj;
}

SampleSet rescale_unit(const SampleSet& set) {
  SampleSet out = set;
  for (auto& g : out.fields) {
    const auto [lo_it, hi_it] = std::minmax_element(g.v.begin(), g.v.end());
    const double lo = *lo_it, span = *hi_it - *lo_it;
    if (span <= 0.0) {
      std::fill(g.v.begin(), g.v.end(), 0.0);
      continue;
    }
    for (auto& v : g.v) v = (v - lo) / span;
  }
  return out;
}

double gaussian_w2_diag(const GridField& m1, const std::vector<double>& lam1,
                        const GridField& m2, const std::vector<double>& lam2) {
  if (m1.n != m2.n || lam1.size() != m1.size() || lam2.size() != m1.size())
    throw std::invalid_argument("gaussian_w2_diag: size mismatch");
  double acc = norm2(m1 - m2);
  for (std::size_t k = 0; k < lam1.size(); ++k) {
    const double d = std::sqrt(lam1[k]) - std::sqrt(lam2[k]);
    acc += d * d;
  }
  return acc;
}

ScoreErrorResult score_error(const ScoreFn& model, const ScoreFn& reference,
                             const std::function<GridField(RngStream&)>& sample_x0,
                             const PriorSpec& prior, const Schedule& sched,
                             const std::function<double(RngStream&)>& sample_t,
                             int n_mc, RngStream& rng) {
  if (n_mc < 1) throw std::invalid_argument("score_error: n_mc < 1");
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    RngStream s = rng.fork(i);
    const GridField x0 = sample_x0(s);
    const double t = sample_t(s);
    const ForwardDraw d = forward_sample(x0, t, sched, prior, s);
    const GridField r = reference(t, d.xt);
    err += norm2(model(t, d.xt) - r) / n_mc;
    ref += norm2(r) / n_mc;
  }
  ScoreErrorResult out;
  out.abs_sq = err;
  out.ref_sq = ref;
  out.rel_sq = ref > 0.0 ? err / ref : err;
  return out;
}

namespace {

// Coupled draw of (Y0 ~ law of X_T, Ytil0 ~ N(0, Q)): shared standard
// normals per mode, the optimal coupling of Gaussians that are simultaneously
// diagonal.
void coupled_initials(const GaussianData& data, const std::vector<double>& lam,
                      const Schedule& sched, RngStream& rng, GridField& y,
                      GridField& ytil) {
  const int n = data.mean.n;
  const double ab = abar_t(sched, sched.T);
  const double bt = btilde_t(sched, sched.T);
  const SpectralCoeffs mu = dft2(data.mean);
  SpectralCoeffs cy(n), cyt(n);
  const double inv_sqrt2 = 0.7071067811865475244;
  for (int si = 0; si < n; ++si) {
    for (int sj = 0; sj < n; ++sj) {
      const int mi = (n - si) % n;
      const int mj = (n - sj) % n;
      const bool self = (mi == si && mj == sj);
      if (!self && (mi < si || (mi == si && mj < sj))) continue;
      const std::size_t idx = static_cast<std::size_t>(si) * n + sj;
      const double sd_y = std::sqrt(ab * ab * data.p[idx] + bt * lam[idx]);
      const double sd_yt = std::sqrt(lam[idx]);
      if (self) {
        const double z = rng.normal();
        cy.at_slot(si, sj) = ab * mu.at_slot(si, sj) + sd_y * z;
        cyt.at_slot(si, sj) = sd_yt * z;
      } else {
        const std::complex<double> z(rng.normal() * inv_sqrt2,
                                     rng.normal() * inv_sqrt2);
        cy.at_slot(si, sj) = ab * mu.at_slot(si, sj) + sd_y * z;
        cy.at_slot(mi, mj) = std::conj(cy.at_slot(si, sj));
        cyt.at_slot(si, sj) = sd_yt * z;
        cyt.at_slot(mi, mj) = std::conj(cyt.at_slot(si, sj));
      }
    }
  }
  y = idft2(cy);
  ytil = idft2(cyt);
}

double logaddexp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

}  // namespace

PathBoundCertificate path_bound_certificate(
    const GaussianData& data, const PriorSpec& prior, const Schedule& sched,
    double t0, const GridField& perturbation, int n_paths, int steps,
    RngStream& rng) {
  if (t0 <= 0.0 || t0 >= sched.T)
    throw std::invalid_argument("path bound: need 0 < t0 < T");
  if (perturbation.n != data.mean.n)
    throw std::invalid_argument("path bound: perturbation resolution mismatch");
  const int n = data.mean.n;
  const auto& lam = eigenvalues(prior, n);

  PathBoundCertificate cert;
  cert.epsilon = t0 * norm2(perturbation);

  // Lipschitz constant of f(s, .) and xi over a dense grid in s
  const int grid = 4096;
  double xi = 0.0, lip = 0.0;
  for (int i = 0; i <= grid; ++i) {
    const double s = t0 * i / grid;
    const double tf = sched.T - s;
    const double al = alpha_t(sched, tf);
    const double ab2 = std::exp(-int_alpha(sched, tf));
    const double bt = btilde_t(sched, tf);
    double kmax = 0.0;
    for (std::size_t k = 0; k < lam.size(); ++k) {
      if (lam[k] <= 0.0) continue;
      const double mult = lam[k] / (ab2 * data.p[k] + bt * lam[k]);
      kmax = std::max(kmax, mult);
    }
    const double ls = al * kmax;
    lip = std::max(lip, ls);
    xi = std::max(xi, 0.25 * al * al + ls * ls);
  }
  cert.xi = xi;
  cert.lipschitz = lip;

  // W2^2 between the forward law at T and the reverse initialization N(0, Q)
  const double abT = abar_t(sched, sched.T);
  const double btT = btilde_t(sched, sched.T);
  std::vector<double> lam_T(lam.size());
  for (std::size_t k = 0; k < lam.size(); ++k)
    lam_T[k] = abT * abT * data.p[k] + btT * lam[k];
  GridField mean_T = data.mean;
  mean_T *= abT;
  cert.w2_init = gaussian_w2_diag(mean_T, lam_T, GridField(n), lam);

  // coupled Monte Carlo estimate of E sup_t ||Y - Ytil||^2
  const double h = t0 / steps;
  double lhs = 0.0;
  for (int p = 0; p < n_paths; ++p) {
    RngStream s = rng.fork(p);
    GridField y, yt;
    coupled_initials(data, lam, sched, s, y, yt);
    double peak = norm2(y - yt);
    for (int i = 0; i < steps; ++i) {
      const double tf = sched.T - i * h;
      const double al = alpha_t(sched, tf);
      const GridField fy = gaussian_score(data, prior, sched, tf, y);
      const GridField fyt = gaussian_score(data, prior, sched, tf, yt);
      const GridField w = sample_prior(prior, n, s);
      const double sq = std::sqrt(al * h);
      GridField dy = y;
      dy *= 0.5 * al;
      dy.axpy(al, fy);
      y.axpy(h, dy);
      y.axpy(sq, w);
      GridField dyt = yt;
      dyt *= 0.5 * al;
      dyt.axpy(al, fyt);
      dyt.axpy(1.0, perturbation);
      yt.axpy(h, dyt);
      yt.axpy(sq, w);
      peak = std::max(peak, norm2(y - yt));
    }
    lhs += peak / n_paths;
  }
  cert.log_lhs = std::log(lhs);

  cert.log_eps_term = std::log(12.0 * t0 * cert.epsilon) + 4.0 * xi * t0 * t0;
  cert.log_w2_term = cert.w2_init > 0.0
                         ? std::log(12.0 * cert.w2_init) + 3.0 * xi * t0 * t0
                         : -INFINITY;
  cert.log_rhs = logaddexp(cert.log_eps_term, cert.log_w2_term);
  return cert;
}

}  // namespace tcdiff
