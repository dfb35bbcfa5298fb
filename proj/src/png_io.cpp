#include "tcdiff/png_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "tcdiff/metrics.hpp"

namespace tcdiff {

namespace {

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::uint8_t* data, std::size_t len) {
  put_u32be(out, static_cast<std::uint32_t>(len));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  if (len) out.insert(out.end(), data, data + len);
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + start, static_cast<uInt>(4 + len));
  put_u32be(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

void write_png_gray(const std::string& path, int width, int height,
                    const std::vector<std::uint8_t>& pixels) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("png: nonpositive dimensions");
  if (pixels.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("png: pixel count mismatch");

  // filter byte 0 per scanline
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), pixels.begin() + static_cast<std::size_t>(y) * width,
               pixels.begin() + static_cast<std::size_t>(y + 1) * width);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(bound);
  if (compress2(z.data(), &bound, raw.data(), static_cast<uLong>(raw.size()),
                9) != Z_OK)
    throw std::runtime_error("png: deflate failed");
  z.resize(bound);

  std::vector<std::uint8_t> out;
  static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  out.insert(out.end(), sig, sig + 8);
  std::uint8_t ihdr[13];
  ihdr[0] = static_cast<std::uint8_t>(width >> 24);
  ihdr[1] = static_cast<std::uint8_t>(width >> 16);
  ihdr[2] = static_cast<std::uint8_t>(width >> 8);
  ihdr[3] = static_cast<std::uint8_t>(width);
  ihdr[4] = static_cast<std::uint8_t>(height >> 24);
  ihdr[5] = static_cast<std::uint8_t>(height >> 16);
  ihdr[6] = static_cast<std::uint8_t>(height >> 8);
  ihdr[7] = static_cast<std::uint8_t>(height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // no interlace
  put_chunk(out, "IHDR", ihdr, sizeof ihdr);
  put_chunk(out, "IDAT", z.data(), z.size());
  put_chunk(out, "IEND", nullptr, 0);

  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("png: cannot open " + path);
  const std::size_t wrote = std::fwrite(out.data(), 1, out.size(), f);
  std::fclose(f);
  if (wrote != out.size()) throw std::runtime_error("png: short write " + path);
}

void write_field_montage(const std::string& path,
                         const std::vector<GridField>& fields) {
  if (fields.empty()) throw std::invalid_argument("montage: no fields");
  const int n = fields.front().n;
  for (const auto& f : fields)
    if (f.n != n) throw std::invalid_argument("montage: mixed resolutions");
  const int count = static_cast<int>(fields.size());
  const int cols = static_cast<int>(std::ceil(std::sqrt(double(count))));
  const int rows = (count + cols - 1) / cols;
  const int w = cols * n + (cols - 1);
  const int h = rows * n + (rows - 1);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h, 255);
  SampleSet set;
  set.n = n;
  set.fields = fields;
  const SampleSet unit = rescale_unit(set);
  for (int idx = 0; idx < count; ++idx) {
    const int r = idx / cols, c = idx % cols;
    const int y0 = r * (n + 1), x0 = c * (n + 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double v = std::clamp(unit.fields[idx].at(i, j), 0.0, 1.0);
        px[static_cast<std::size_t>(y0 + i) * w + (x0 + j)] =
            static_cast<std::uint8_t>(std::lround(v * 255.0));
      }
  }
  write_png_gray(path, w, h, px);
}

}  // namespace tcdiff
