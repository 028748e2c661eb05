#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dvio/core/types.hpp"

namespace dvio {

enum class DepthMode : std::uint32_t {
  kAffineInverse = 0,  // values in the network's inverse-depth units
  kMetric = 1,         // values in meters
};

/// Dense H x W grid of depth predictions.
struct DepthMap {
  DepthMode mode = DepthMode::kAffineInverse;
  int width = 0;
  int height = 0;
  std::vector<float> values;  // row-major, height * width

  static DepthMap create(int width, int height, DepthMode mode,
                         float fill = 0.0f);

  float& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

enum class SampleMode {
  kPoint,   // nearest pixel
  kMax5x5,  // foreground-biased: maximum in inverse-depth convention
};

/// Samples the map at a (sub-)pixel location. The 5x5 patch is truncated at
/// image borders. Selection in kMax5x5 happens in inverse-depth convention
/// (nearest surface wins); the returned value stays in the map's own
/// convention. Empty if the pixel is out of bounds.
std::optional<double> sample_depth(const DepthMap& map, const Vec2& px,
                                   SampleMode mode);

/// Converts a sampled value to metric inverse depth units (1/m) pre-alignment.
/// For metric maps this inverts the value; non-positive values yield empty.
std::optional<double> to_inverse_units(double value, DepthMode mode);

// Binary .dpm container: 16-byte header (magic "DPM1", u32 width, u32 height,
// u32 mode), then row-major little-endian f32 samples.
void save_dpm(const std::string& path, const DepthMap& map);
DepthMap load_dpm(const std::string& path);  // throws IoError on bad files

}  // namespace dvio
