#include "dvio/depth/depth_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "dvio/core/errors.hpp"

namespace dvio {

namespace {

constexpr char kMagic[4] = {'D', 'P', 'M', '1'};

// The .dpm payload is little-endian on disk; raw reads/writes below rely on
// a matching host layout.
static_assert(std::endian::native == std::endian::little);

double inverse_convention(float v, DepthMode mode) {
  if (mode == DepthMode::kAffineInverse) return v;
  return v > 1e-9f ? 1.0 / static_cast<double>(v) : 0.0;
}

}  // namespace

DepthMap DepthMap::create(int width, int height, DepthMode mode, float fill) {
  DepthMap m;
  m.mode = mode;
  m.width = width;
  m.height = height;
  m.values.assign(static_cast<std::size_t>(width) * height, fill);
  return m;
}

std::optional<double> sample_depth(const DepthMap& map, const Vec2& px,
                                   SampleMode mode) {
  const int x = static_cast<int>(std::lround(px.x()));
  const int y = static_cast<int>(std::lround(px.y()));
  if (!map.in_bounds(x, y)) return std::nullopt;
  if (mode == SampleMode::kPoint) return map.at(x, y);

  double best_value = map.at(x, y);
  double best_inverse = inverse_convention(map.at(x, y), map.mode);
  for (int dy = -2; dy <= 2; ++dy) {
    for (int dx = -2; dx <= 2; ++dx) {
      const int nx = x + dx;
      const int ny = y + dy;
      if (!map.in_bounds(nx, ny)) continue;  // truncate patch at borders
      const float v = map.at(nx, ny);
      const double inv = inverse_convention(v, map.mode);
      if (inv > best_inverse) {
        best_inverse = inv;
        best_value = v;
      }
    }
  }
  return best_value;
}

std::optional<double> to_inverse_units(double value, DepthMode mode) {
  if (mode == DepthMode::kAffineInverse) return value;
  if (value <= 1e-9) return std::nullopt;
  return 1.0 / value;
}

void save_dpm(const std::string& path, const DepthMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  const std::uint32_t w = static_cast<std::uint32_t>(map.width);
  const std::uint32_t h = static_cast<std::uint32_t>(map.height);
  const std::uint32_t mode = static_cast<std::uint32_t>(map.mode);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&mode), 4);
  out.write(reinterpret_cast<const char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(float)));
  if (!out) throw IoError("short write: " + path);
}

DepthMap load_dpm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  char magic[4];
  std::uint32_t w = 0, h = 0, mode = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&mode), 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a DPM1 file: " + path);
  }
  if (mode > 1 || w == 0 || h == 0 || w > 1u << 16 || h > 1u << 16) {
    throw IoError("bad DPM1 header: " + path);
  }
  DepthMap map = DepthMap::create(static_cast<int>(w), static_cast<int>(h),
                                  static_cast<DepthMode>(mode));
  in.read(reinterpret_cast<char*>(map.values.data()),
          static_cast<std::streamsize>(map.values.size() * sizeof(float)));
  if (!in) throw IoError("truncated DPM1 payload: " + path);
  return map;
}

}  // namespace dvio
