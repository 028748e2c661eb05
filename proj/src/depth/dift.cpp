#include "dvio/depth/dift.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dvio/core/errors.hpp"

namespace dvio {

namespace {

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const long y = std::lround(0.299 * r + 0.587 * g + 0.114 * b);
  return static_cast<std::uint8_t>(std::clamp(y, 0L, 255L));
}

}  // namespace

ImageRgb8 ImageRgb8::create(int width, int height, std::uint8_t fill) {
  ImageRgb8 img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) * height * 3, fill);
  return img;
}

ImageGray8 ImageGray8::create(int width, int height, std::uint8_t fill) {
  ImageGray8 img;
  img.width = width;
  img.height = height;
  img.data.assign(static_cast<std::size_t>(width) * height, fill);
  return img;
}

ImageGray8 normalize_depth_u8(const DepthMap& depth) {
  const std::size_t n = depth.values.size();
  ImageGray8 out = ImageGray8::create(depth.width, depth.height, 0);
  if (n == 0) return out;

  std::vector<float> sorted(depth.values);
  const std::size_t lo_idx = static_cast<std::size_t>(0.02 * (n - 1));
  const std::size_t hi_idx = static_cast<std::size_t>(0.98 * (n - 1));
  std::nth_element(sorted.begin(), sorted.begin() + lo_idx, sorted.end());
  const float lo = sorted[lo_idx];
  std::nth_element(sorted.begin(), sorted.begin() + hi_idx, sorted.end());
  const float hi = sorted[hi_idx];

  if (!(hi > lo)) return out;  // degenerate range -> no gradient contribution
  const float scale = 255.0f / (hi - lo);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const float v = std::clamp(depth.values[i], lo, hi);
    out.data[i] = static_cast<std::uint8_t>(std::lround((v - lo) * scale));
  }
  return out;
}

DiftResult dift_transform(const ImageRgb8& rgb, const DepthMap& depth) {
  if (rgb.width != depth.width || rgb.height != depth.height) {
    throw std::invalid_argument("dift_transform: image/depth size mismatch");
  }
  DiftResult res;
  res.rgd = rgb;
  res.gray = ImageGray8::create(rgb.width, rgb.height);
  const ImageGray8 dnorm = normalize_depth_u8(depth);

  const std::int64_t n = static_cast<std::int64_t>(dnorm.data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint8_t r = rgb.data[3 * i + 0];
    const std::uint8_t g = rgb.data[3 * i + 1];
    const std::uint8_t d = dnorm.data[i];
    res.rgd.data[3 * i + 2] = d;
    res.gray.data[i] = luminance(r, g, d);
  }
  return res;
}

ImageGray8 to_grayscale(const ImageRgb8& rgb) {
  ImageGray8 out = ImageGray8::create(rgb.width, rgb.height);
  const std::int64_t n = static_cast<std::int64_t>(out.data.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out.data[i] =
        luminance(rgb.data[3 * i], rgb.data[3 * i + 1], rgb.data[3 * i + 2]);
  }
  return out;
}

double mean_sobel_gradient(const ImageGray8& img,
                           const std::vector<std::uint8_t>& mask) {
  if (img.width < 3 || img.height < 3) return 0.0;
  if (!mask.empty() && mask.size() != img.data.size()) {
    throw std::invalid_argument("mean_sobel_gradient: mask size mismatch");
  }
  double sum = 0.0;
  std::int64_t count = 0;
#pragma omp parallel for schedule(static) reduction(+ : sum, count)
  for (int y = 1; y < img.height - 1; ++y) {
    for (int x = 1; x < img.width - 1; ++x) {
      if (!mask.empty() &&
          mask[static_cast<std::size_t>(y) * img.width + x] == 0) {
        continue;
      }
      auto p = [&](int dx, int dy) {
        return static_cast<double>(img.at(x + dx, y + dy));
      };
      const double gx = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) -
                        (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
      const double gy = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) -
                        (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
      sum += std::sqrt(gx * gx + gy * gy);
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

void save_ppm(const std::string& path, const ImageRgb8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw IoError("short write: " + path);
}

ImageRgb8 load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
    throw IoError("not an 8-bit P6 PPM: " + path);
  }
  in.get();  // single whitespace after header
  ImageRgb8 img = ImageRgb8::create(w, h);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(img.data.size()));
  if (!in) throw IoError("truncated PPM payload: " + path);
  return img;
}

}  // namespace dvio
