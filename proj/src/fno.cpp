#include "tcdiff/fno.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "tcdiff/fft.hpp"
#include "tcdiff/rng.hpp"
#include "tcdiff/spectral.hpp"

namespace tcdiff {

void validate(const FnoConfig& cfg) {
  if (cfg.layers < 1) throw std::invalid_argument("FnoConfig: layers < 1");
  if (cfg.width < 1) throw std::invalid_argument("FnoConfig: width < 1");
  if (cfg.modes1 < 0 || cfg.modes2 < 0)
    throw std::invalid_argument("FnoConfig: negative mode cutoff");
}

namespace {

std::vector<std::pair<int, int>> stored_modes(const FnoConfig& cfg) {
  std::vector<std::pair<int, int>> v;
  for (int k2 = 0; k2 <= cfg.modes2; ++k2) v.emplace_back(0, k2);
  for (int k1 = 1; k1 <= cfg.modes1; ++k1)
    for (int k2 = -cfg.modes2; k2 <= cfg.modes2; ++k2) v.emplace_back(k1, k2);
  return v;
}

struct Layout {
  int L, C;
  std::size_t M;          // stored modes
  std::size_t lift_w, lift_b, layer0, per_layer, proj_w, proj_b, total;

  explicit Layout(const FnoConfig& cfg)
      : L(cfg.layers), C(cfg.width), M(stored_mode_count(cfg)) {
    const std::size_t c = static_cast<std::size_t>(C);
    lift_w = 0;
    lift_b = 2 * c;
    layer0 = 3 * c;
    per_layer = c * c + c + 2 * M * c * c;
    proj_w = layer0 + static_cast<std::size_t>(L) * per_layer;
    proj_b = proj_w + c;
    total = proj_b + 1;
  }
  std::size_t w(int l) const { return layer0 + l * per_layer; }
  std::size_t b(int l) const { return w(l) + static_cast<std::size_t>(C) * C; }
  std::size_t pmode(int l, std::size_t m) const {
    return b(l) + C + 2 * m * static_cast<std::size_t>(C) * C;
  }
};

inline double gelu(double z) { return 0.5 * z * std::erfc(-z * M_SQRT1_2); }

inline double gelu_prime(double z) {
  const double phi = 0.5 * std::erfc(-z * M_SQRT1_2);
  const double dens = std::exp(-0.5 * z * z) * 0.3989422804014326779;
  return phi + z * dens;
}

void effective_modes(const FnoConfig& cfg, int n,
                     std::vector<std::pair<int, int>>& modes,
                     std::vector<int>& index) {
  modes.clear();
  index.clear();
  const int cap = (n - 1) / 2;  // strictly below Nyquist
  const auto all = stored_modes(cfg);
  for (std::size_t m = 0; m < all.size(); ++m) {
    const auto [k1, k2] = all[m];
    if (std::abs(k1) <= cap && std::abs(k2) <= cap) {
      modes.push_back(all[m]);
      index.push_back(static_cast<int>(m));
    }
  }
}

}  // namespace

std::size_t stored_mode_count(const FnoConfig& cfg) {
  return static_cast<std::size_t>(cfg.modes2) + 1 +
         static_cast<std::size_t>(cfg.modes1) * (2 * cfg.modes2 + 1);
}

std::size_t param_count(const FnoConfig& cfg) { return Layout(cfg).total; }

FnoParams fno_zero(const FnoConfig& cfg) {
  validate(cfg);
  FnoParams p;
  p.cfg = cfg;
  p.theta.assign(param_count(cfg), 0.0);
  return p;
}

FnoParams fno_init(const FnoConfig& cfg, std::uint64_t seed) {
  FnoParams p = fno_zero(cfg);
  const Layout lay(cfg);
  RngStream rng(seed);
  const int C = cfg.width;
  const double lift_bound = std::sqrt(6.0 / (2 + C));
  for (std::size_t i = 0; i < 2 * static_cast<std::size_t>(C); ++i)
    p.theta[lay.lift_w + i] = rng.uniform(-lift_bound, lift_bound);
  const double w_bound = std::sqrt(6.0 / (2 * C));
  const double spec_scale = 1.0 / C;
  for (int l = 0; l < cfg.layers; ++l) {
    for (std::size_t i = 0; i < static_cast<std::size_t>(C) * C; ++i)
      p.theta[lay.w(l) + i] = rng.uniform(-w_bound, w_bound);
    for (std::size_t i = 0; i < lay.M * 2 * static_cast<std::size_t>(C) * C; ++i)
      p.theta[lay.pmode(l, 0) + i] = rng.uniform(-spec_scale, spec_scale);
    // mode (0,0) acts on a real coefficient and only its real part can reach
    // the output; keep the dead imaginary entries at zero
    for (int c = 0; c < C; ++c)
      for (int d = 0; d < C; ++d)
        p.theta[lay.pmode(l, 0) + 2 * (static_cast<std::size_t>(c) * C + d) + 1] = 0.0;
  }
  const double proj_bound = std::sqrt(6.0 / (C + 1));
  for (int c = 0; c < C; ++c)
    p.theta[lay.proj_w + c] = rng.uniform(-proj_bound, proj_bound);
  return p;
}

GridField fno_forward(const FnoParams& p, double t, const GridField& x) {
  FnoTape tape;
  return fno_forward(p, t, x, tape);
}

GridField fno_forward(const FnoParams& p, double t, const GridField& x,
                      FnoTape& tape) {
  validate(p.cfg);
  if (x.n < 4)
    throw std::invalid_argument("fno_forward: resolution below minimum (4)");
  if (p.theta.size() != param_count(p.cfg))
    throw std::invalid_argument("fno_forward: parameter size mismatch");
  const Layout lay(p.cfg);
  const int N = x.n, C = p.cfg.width, L = p.cfg.layers;
  const std::size_t NP = static_cast<std::size_t>(N) * N;
  const double* th = p.theta.data();

  tape.n = N;
  tape.t = t;
  tape.x = x.v;
  effective_modes(p.cfg, N, tape.eff_modes, tape.eff_index);
  const std::size_t ME = tape.eff_modes.size();
  tape.v.resize(L + 1);
  tape.z.resize(L);
  tape.vhat.resize(L);

  // lift
  auto& v0 = tape.v[0];
  v0.resize(static_cast<std::size_t>(C) * NP);
  for (int c = 0; c < C; ++c) {
    const double wx = th[lay.lift_w + 2 * c];
    const double wt = th[lay.lift_w + 2 * c + 1];
    const double bias = th[lay.lift_b + c] + wt * t;
    double* out = v0.data() + static_cast<std::size_t>(c) * NP;
    for (std::size_t q = 0; q < NP; ++q) out[q] = wx * x.v[q] + bias;
  }

  std::vector<std::complex<double>> cbuf(NP);
  std::vector<std::complex<double>> ubuf(ME * C);

  for (int l = 0; l < L; ++l) {
    const auto& vin = tape.v[l];
    auto& z = tape.z[l];
    z.assign(static_cast<std::size_t>(C) * NP, 0.0);

    // pointwise path
    for (int c = 0; c < C; ++c) {
      double* zc = z.data() + static_cast<std::size_t>(c) * NP;
      const double bias = th[lay.b(l) + c];
      for (std::size_t q = 0; q < NP; ++q) zc[q] = bias;
      for (int d = 0; d < C; ++d) {
        const double w = th[lay.w(l) + static_cast<std::size_t>(c) * C + d];
        const double* vd = vin.data() + static_cast<std::size_t>(d) * NP;
        for (std::size_t q = 0; q < NP; ++q) zc[q] += w * vd[q];
      }
    }

    // spectral path: normalized transforms of every input channel at the
    // engaged modes
    auto& vhat = tape.vhat[l];
    vhat.assign(ME * C, 0.0);
    const double inv_np = 1.0 / static_cast<double>(NP);
    for (int d = 0; d < C; ++d) {
      const double* vd = vin.data() + static_cast<std::size_t>(d) * NP;
      for (std::size_t q = 0; q < NP; ++q) cbuf[q] = vd[q];
      fft2_inplace(N, cbuf.data(), -1);
      for (std::size_t m = 0; m < ME; ++m) {
        const auto [k1, k2] = tape.eff_modes[m];
        vhat[m * C + d] =
            inv_np * cbuf[static_cast<std::size_t>(slot_of_freq(k1, N)) * N +
                          slot_of_freq(k2, N)];
      }
    }

    // per-mode complex matmul U(k) = P(k) V(k)
    for (std::size_t m = 0; m < ME; ++m) {
      const double* pm = th + lay.pmode(l, tape.eff_index[m]);
      for (int c = 0; c < C; ++c) {
        double ar = 0.0, ai = 0.0;
        const double* row = pm + 2 * static_cast<std::size_t>(c) * C;
        for (int d = 0; d < C; ++d) {
          const double pr = row[2 * d], pi = row[2 * d + 1];
          const std::complex<double> v = vhat[m * C + d];
          ar += pr * v.real() - pi * v.imag();
          ai += pr * v.imag() + pi * v.real();
        }
        ubuf[m * C + c] = {ar, ai};
      }
    }

    // scatter + inverse transform per output channel
    for (int c = 0; c < C; ++c) {
      std::fill(cbuf.begin(), cbuf.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t m = 0; m < ME; ++m) {
        const auto [k1, k2] = tape.eff_modes[m];
        const std::complex<double> u = ubuf[m * C + c];
        cbuf[static_cast<std::size_t>(slot_of_freq(k1, N)) * N +
             slot_of_freq(k2, N)] = u;
        if (!(k1 == 0 && k2 == 0))
          cbuf[static_cast<std::size_t>(slot_of_freq(-k1, N)) * N +
               slot_of_freq(-k2, N)] = std::conj(u);
      }
      fft2_inplace(N, cbuf.data(), +1);
      double* zc = z.data() + static_cast<std::size_t>(c) * NP;
      for (std::size_t q = 0; q < NP; ++q) zc[q] += cbuf[q].real();
    }

    // activation
    auto& vout = tape.v[l + 1];
    vout.resize(static_cast<std::size_t>(C) * NP);
    if (p.cfg.act == Activation::Gelu)
      for (std::size_t i = 0; i < z.size(); ++i) vout[i] = gelu(z[i]);
    else
      vout = z;
  }

  // projection
  GridField y(N);
  const double ob = th[lay.proj_b];
  for (std::size_t q = 0; q < NP; ++q) y.v[q] = ob;
  for (int c = 0; c < C; ++c) {
    const double a = th[lay.proj_w + c];
    const double* vc = tape.v[L].data() + static_cast<std::size_t>(c) * NP;
    for (std::size_t q = 0; q < NP; ++q) y.v[q] += a * vc[q];
  }
  return y;
}

void fno_backward(const FnoParams& p, const FnoTape& tape,
                  const GridField& grad_out, std::vector<double>& grad_theta,
                  GridField* grad_x) {
  const Layout lay(p.cfg);
  const int N = tape.n, C = p.cfg.width, L = p.cfg.layers;
  const std::size_t NP = static_cast<std::size_t>(N) * N;
  if (grad_out.n != N)
    throw std::invalid_argument("fno_backward: grad resolution mismatch");
  if (grad_theta.size() != p.theta.size())
    throw std::invalid_argument("fno_backward: grad buffer size mismatch");
  const double* th = p.theta.data();
  double* gt = grad_theta.data();
  const std::size_t ME = tape.eff_modes.size();

  // projection
  std::vector<double> gv(static_cast<std::size_t>(C) * NP);
  double gob = 0.0;
  for (std::size_t q = 0; q < NP; ++q) gob += grad_out.v[q];
  gt[lay.proj_b] += gob;
  for (int c = 0; c < C; ++c) {
    const double a = th[lay.proj_w + c];
    const double* vc = tape.v[L].data() + static_cast<std::size_t>(c) * NP;
    double* gvc = gv.data() + static_cast<std::size_t>(c) * NP;
    double acc = 0.0;
    for (std::size_t q = 0; q < NP; ++q) {
      acc += grad_out.v[q] * vc[q];
      gvc[q] = a * grad_out.v[q];
    }
    gt[lay.proj_w + c] += acc;
  }

  std::vector<double> gz(static_cast<std::size_t>(C) * NP);
  std::vector<double> gvin(static_cast<std::size_t>(C) * NP);
  std::vector<std::complex<double>> cbuf(NP);
  std::vector<std::complex<double>> gtot(ME * C);
  std::vector<std::complex<double>> gvhat(ME * C);

  for (int l = L - 1; l >= 0; --l) {
    const auto& z = tape.z[l];
    const auto& vin = tape.v[l];
    const auto& vhat = tape.vhat[l];

    if (p.cfg.act == Activation::Gelu)
      for (std::size_t i = 0; i < gz.size(); ++i) gz[i] = gv[i] * gelu_prime(z[i]);
    else
      gz = gv;

    // pointwise path
    std::fill(gvin.begin(), gvin.end(), 0.0);
    for (int c = 0; c < C; ++c) {
      const double* gzc = gz.data() + static_cast<std::size_t>(c) * NP;
      double bacc = 0.0;
      for (std::size_t q = 0; q < NP; ++q) bacc += gzc[q];
      gt[lay.b(l) + c] += bacc;
      for (int d = 0; d < C; ++d) {
        const double* vd = vin.data() + static_cast<std::size_t>(d) * NP;
        double* gd = gvin.data() + static_cast<std::size_t>(d) * NP;
        const double w = th[lay.w(l) + static_cast<std::size_t>(c) * C + d];
        double wacc = 0.0;
        for (std::size_t q = 0; q < NP; ++q) {
          wacc += gzc[q] * vd[q];
          gd[q] += w * gzc[q];
        }
        gt[lay.w(l) + static_cast<std::size_t>(c) * C + d] += wacc;
      }
    }

    // spectral path: G(k) = unnormalized forward transform of gz, doubled on
    // conjugate-paired modes (the mirrored slot carries the same information
    // for a real field)
    for (int c = 0; c < C; ++c) {
      const double* gzc = gz.data() + static_cast<std::size_t>(c) * NP;
      for (std::size_t q = 0; q < NP; ++q) cbuf[q] = gzc[q];
      fft2_inplace(N, cbuf.data(), -1);
      for (std::size_t m = 0; m < ME; ++m) {
        const auto [k1, k2] = tape.eff_modes[m];
        const double mult = (k1 == 0 && k2 == 0) ? 1.0 : 2.0;
        gtot[m * C + c] =
            mult * cbuf[static_cast<std::size_t>(slot_of_freq(k1, N)) * N +
                        slot_of_freq(k2, N)];
      }
    }

    for (std::size_t m = 0; m < ME; ++m) {
      double* gpm = gt + lay.pmode(l, tape.eff_index[m]);
      const double* pm = th + lay.pmode(l, tape.eff_index[m]);
      for (int d = 0; d < C; ++d) gvhat[m * C + d] = 0.0;
      for (int c = 0; c < C; ++c) {
        const std::complex<double> g = gtot[m * C + c];
        double* grow = gpm + 2 * static_cast<std::size_t>(c) * C;
        const double* prow = pm + 2 * static_cast<std::size_t>(c) * C;
        for (int d = 0; d < C; ++d) {
          const std::complex<double> v = vhat[m * C + d];
          // dJ/dP = g conj(v)
          grow[2 * d] += g.real() * v.real() + g.imag() * v.imag();
          grow[2 * d + 1] += g.imag() * v.real() - g.real() * v.imag();
          // dJ/dV += conj(P) g
          const double pr = prow[2 * d], pi = prow[2 * d + 1];
          gvhat[m * C + d] += std::complex<double>(
              pr * g.real() + pi * g.imag(), pr * g.imag() - pi * g.real());
        }
      }
    }

    const double inv_np = 1.0 / static_cast<double>(NP);
    for (int d = 0; d < C; ++d) {
      std::fill(cbuf.begin(), cbuf.end(), std::complex<double>(0.0, 0.0));
      for (std::size_t m = 0; m < ME; ++m) {
        const auto [k1, k2] = tape.eff_modes[m];
        cbuf[static_cast<std::size_t>(slot_of_freq(k1, N)) * N +
             slot_of_freq(k2, N)] = gvhat[m * C + d];
      }
      fft2_inplace(N, cbuf.data(), +1);
      double* gd = gvin.data() + static_cast<std::size_t>(d) * NP;
      for (std::size_t q = 0; q < NP; ++q) gd[q] += inv_np * cbuf[q].real();
    }

    std::swap(gv, gvin);
  }

  // lift
  if (grad_x) {
    grad_x->n = N;
    grad_x->v.assign(NP, 0.0);
  }
  for (int c = 0; c < C; ++c) {
    const double* gvc = gv.data() + static_cast<std::size_t>(c) * NP;
    double accx = 0.0, acct = 0.0, accb = 0.0;
    for (std::size_t q = 0; q < NP; ++q) {
      accx += gvc[q] * tape.x[q];
      acct += gvc[q];
    }
    accb = acct;
    gt[lay.lift_w + 2 * c] += accx;
    gt[lay.lift_w + 2 * c + 1] += acct * tape.t;
    gt[lay.lift_b + c] += accb;
    if (grad_x) {
      const double wx = th[lay.lift_w + 2 * c];
      for (std::size_t q = 0; q < NP; ++q) grad_x->v[q] += wx * gvc[q];
    }
  }
}

void save_checkpoint(const FnoParams& p, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
  const char magic[4] = {'T', 'C', 'F', 'N'};
  const std::uint32_t version = 1;
  const std::int32_t meta[5] = {p.cfg.layers, p.cfg.width, p.cfg.modes1,
                                p.cfg.modes2, static_cast<std::int32_t>(p.cfg.act)};
  const std::uint64_t count = p.theta.size();
  bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
            std::fwrite(&version, sizeof version, 1, f) == 1 &&
            std::fwrite(meta, sizeof meta, 1, f) == 1 &&
            std::fwrite(&count, sizeof count, 1, f) == 1 &&
            std::fwrite(p.theta.data(), sizeof(double), count, f) == count;
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw std::runtime_error("save_checkpoint: write failed: " + path);
}

FnoParams load_checkpoint(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
  auto fail = [&](const std::string& why) {
    std::fclose(f);
    throw std::runtime_error("load_checkpoint: " + why + ": " + path);
  };
  char magic[4];
  std::uint32_t version = 0;
  std::int32_t meta[5];
  std::uint64_t count = 0;
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "TCFN", 4) != 0)
    fail("bad magic");
  if (std::fread(&version, sizeof version, 1, f) != 1 || version != 1)
    fail("unsupported version");
  if (std::fread(meta, sizeof meta, 1, f) != 1) fail("truncated header");
  if (std::fread(&count, sizeof count, 1, f) != 1) fail("truncated header");
  FnoParams p;
  p.cfg.layers = meta[0];
  p.cfg.width = meta[1];
  p.cfg.modes1 = meta[2];
  p.cfg.modes2 = meta[3];
  p.cfg.act = static_cast<Activation>(meta[4]);
  validate(p.cfg);
  if (count != param_count(p.cfg)) fail("parameter count mismatch");
  p.theta.resize(count);
  if (std::fread(p.theta.data(), sizeof(double), count, f) != count)
    fail("truncated parameters");
  std::fclose(f);
  return p;
}

}  // namespace tcdiff
