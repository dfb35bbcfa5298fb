#include "tcdiff/data.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "tcdiff/spectral.hpp"

namespace tcdiff {

GmmData make_two_ramp_gmm(const PriorSpec& q, int n) {
  GridField f1(n), f2(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      f1.at(i, j) = static_cast<double>(j) / n;
      f2.at(i, j) = 1.0 - static_cast<double>(i) / n;
    }
  GmmData d;
  d.means.push_back(apply_sqrt(q, f1));
  d.means.push_back(apply_sqrt(q, f2));
  return d;
}

GmmData condition_gmm(const GmmData& data, int target_n) {
  GmmData out;
  for (const auto& m : data.means)
    out.means.push_back(m.n == target_n ? m : project_to_modes(m, target_n));
  return out;
}

SampleSet gmm_sample(const GmmData& data, const PriorSpec& q, int count,
                     RngStream& rng) {
  if (data.means.empty()) throw std::invalid_argument("gmm_sample: no means");
  SampleSet s;
  s.n = data.means[0].n;
  s.prov = Provenance::Native;
  s.fields.reserve(count);
  for (int i = 0; i < count; ++i) {
    RngStream st = rng.fork(i);
    const std::size_t c = st.uniform_index(data.means.size());
    GridField x = sample_prior(q, s.n, st);
    x += data.means[c];
    s.fields.push_back(std::move(x));
  }
  return s;
}

namespace {

std::uint32_t read_be32(std::FILE* f, const std::string& path) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, f) != 4)
    throw std::runtime_error("idx: truncated header: " + path);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
         (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

SampleSet load_mnist_idx(const std::string& images_path, int limit) {
  std::FILE* f = std::fopen(images_path.c_str(), "rb");
  if (!f) throw std::runtime_error("idx: cannot open " + images_path);
  try {
    const std::uint32_t magic = read_be32(f, images_path);
    if (magic != 0x00000803u)
      throw std::runtime_error("idx: bad image magic in " + images_path);
    const std::uint32_t count = read_be32(f, images_path);
    const std::uint32_t rows = read_be32(f, images_path);
    const std::uint32_t cols = read_be32(f, images_path);
    if (rows != 28 || cols != 28)
      throw std::runtime_error("idx: expected 28x28 images in " + images_path);
    const std::uint32_t take =
        limit < 0 ? count : std::min<std::uint32_t>(count, limit);
    SampleSet s;
    s.n = 32;
    s.prov = Provenance::Native;
    s.fields.reserve(take);
    std::vector<unsigned char> raw(28 * 28);
    for (std::uint32_t i = 0; i < take; ++i) {
      if (std::fread(raw.data(), 1, raw.size(), f) != raw.size())
        throw std::runtime_error("idx: truncated image data in " + images_path);
      GridField g(32);
      for (int r = 0; r < 28; ++r)
        for (int c = 0; c < 28; ++c)
          g.at(r + 2, c + 2) = raw[r * 28 + c] / 255.0;
      s.fields.push_back(std::move(g));
    }
    std::fclose(f);
    return s;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

std::vector<std::uint8_t> load_mnist_labels(const std::string& labels_path,
                                            int limit) {
  std::FILE* f = std::fopen(labels_path.c_str(), "rb");
  if (!f) throw std::runtime_error("idx: cannot open " + labels_path);
  try {
    const std::uint32_t magic = read_be32(f, labels_path);
    if (magic != 0x00000801u)
      throw std::runtime_error("idx: bad label magic in " + labels_path);
    const std::uint32_t count = read_be32(f, labels_path);
    const std::uint32_t take =
        limit < 0 ? count : std::min<std::uint32_t>(count, limit);
    std::vector<std::uint8_t> out(take);
    if (std::fread(out.data(), 1, take, f) != take)
      throw std::runtime_error("idx: truncated labels in " + labels_path);
    std::fclose(f);
    return out;
  } catch (...) {
    std::fclose(f);
    throw;
  }
}

SampleSet condition_resolution(const SampleSet& set, int target_n) {
  if (target_n == set.n) return set;
  SampleSet out;
  out.n = target_n;
  out.prov = Provenance::Projected;
  out.fields.reserve(set.fields.size());
  for (const auto& g : set.fields)
    out.fields.push_back(target_n < set.n ? project_to_modes(g, target_n)
                                          : upsample_to(g, target_n));
  return out;
}

void save_sample_set(const SampleSet& set, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("sample set: cannot open " + path);
  const char magic[4] = {'T', 'C', 'F', 'S'};
  const std::uint32_t version = 1;
  const std::uint32_t prov = static_cast<std::uint32_t>(set.prov);
  const std::uint32_t count = static_cast<std::uint32_t>(set.fields.size());
  const std::uint32_t n = static_cast<std::uint32_t>(set.n);
  bool ok = std::fwrite(magic, 1, 4, f) == 4 &&
            std::fwrite(&version, 4, 1, f) == 1 &&
            std::fwrite(&prov, 4, 1, f) == 1 &&
            std::fwrite(&count, 4, 1, f) == 1 && std::fwrite(&n, 4, 1, f) == 1;
  for (const auto& g : set.fields) {
    if (!ok) break;
    if (g.n != set.n) {
      std::fclose(f);
      throw std::invalid_argument("sample set: inconsistent resolution");
    }
    ok = std::fwrite(g.v.data(), sizeof(double), g.v.size(), f) == g.v.size();
  }
  ok = (std::fclose(f) == 0) && ok;
  if (!ok) throw std::runtime_error("sample set: write failed: " + path);
}

SampleSet load_sample_set(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw std::runtime_error("sample set: cannot open " + path);
  auto fail = [&](const std::string& why) {
    std::fclose(f);
    throw std::runtime_error("sample set: " + why + ": " + path);
  };
  char magic[4];
  std::uint32_t version = 0, prov = 0, count = 0, n = 0;
  if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, "TCFS", 4) != 0)
    fail("bad magic");
  if (std::fread(&version, 4, 1, f) != 1 || version != 1)
    fail("unsupported version");
  if (std::fread(&prov, 4, 1, f) != 1 || prov > 3) fail("bad provenance");
  if (std::fread(&count, 4, 1, f) != 1) fail("truncated header");
  if (std::fread(&n, 4, 1, f) != 1 || n < 1) fail("bad resolution");
  SampleSet s;
  s.n = static_cast<int>(n);
  s.prov = static_cast<Provenance>(prov);
  s.fields.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    GridField g(static_cast<int>(n));
    if (std::fread(g.v.data(), sizeof(double), g.v.size(), f) != g.v.size())
      fail("truncated field data");
    s.fields.push_back(std::move(g));
  }
  std::fclose(f);
  return s;
}

}  // namespace tcdiff
