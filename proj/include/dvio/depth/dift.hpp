#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dvio/depth/depth_map.hpp"

namespace dvio {

/// Interleaved 8-bit RGB image.
struct ImageRgb8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // 3 * width * height

  static ImageRgb8 create(int width, int height, std::uint8_t fill = 0);
  std::uint8_t& at(int x, int y, int c) {
    return data[3 * (static_cast<std::size_t>(y) * width + x) + c];
  }
  std::uint8_t at(int x, int y, int c) const {
    return data[3 * (static_cast<std::size_t>(y) * width + x) + c];
  }
};

struct ImageGray8 {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // width * height

  static ImageGray8 create(int width, int height, std::uint8_t fill = 0);
  std::uint8_t& at(int x, int y) {
    return data[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t at(int x, int y) const {
    return data[static_cast<std::size_t>(y) * width + x];
  }
};

/// 2%-98% percentile clamp of the depth values, mapped linearly to [0,255].
/// A degenerate clamp range (max == min) maps to 0 everywhere so the channel
/// contributes no gradient.
ImageGray8 normalize_depth_u8(const DepthMap& depth);

struct DiftResult {
  ImageRgb8 rgd;    // input with the Blue channel replaced by D_norm
  ImageGray8 gray;  // round(0.299 R + 0.587 G + 0.114 D_norm)
};

/// Channel-injection transform: superimposes normalized depth onto the
/// minimal-weight Blue channel so the tracking grayscale inherits geometric
/// gradients. Throws std::invalid_argument on dimension mismatch.
DiftResult dift_transform(const ImageRgb8& rgb, const DepthMap& depth);

/// Plain luminance conversion round(0.299 R + 0.587 G + 0.114 B).
ImageGray8 to_grayscale(const ImageRgb8& rgb);

/// Mean Sobel gradient magnitude over interior pixels; a non-empty mask
/// (width*height, nonzero = keep) restricts the average to that region.
double mean_sobel_gradient(const ImageGray8& img,
                           const std::vector<std::uint8_t>& mask = {});

// Binary PPM (P6) round trip for synthetic RGB frames.
void save_ppm(const std::string& path, const ImageRgb8& img);
ImageRgb8 load_ppm(const std::string& path);

}  // namespace dvio
