#pragma once

#include <optional>

#include "dvio/core/types.hpp"

namespace dvio {

/// Pinhole camera without distortion. Pixel (u,v) = (fx*x/z + cx, fy*y/z + cy).
struct Camera {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Points closer than this along +z count as behind the camera.
  static constexpr double kZMin = 1e-6;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
           cx < width && cy >= 0.0 && cy < height;
  }

  /// Projects a camera-frame point. Empty if z <= kZMin (behind camera).
  std::optional<Vec2> project(const Vec3& p) const {
    if (p.z() <= kZMin) return std::nullopt;
    return Vec2(fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy);
  }

  /// Ray through a pixel at unit depth (z = 1).
  Vec3 unit_ray(const Vec2& px) const {
    return Vec3((px.x() - cx) / fx, (px.y() - cy) / fy, 1.0);
  }

  /// Camera-frame point for a pixel at the given inverse depth (1/m).
  std::optional<Vec3> back_project(const Vec2& px, double inv_depth) const {
    if (inv_depth <= 0.0) return std::nullopt;
    return Vec3(unit_ray(px) / inv_depth);
  }

  bool in_bounds(const Vec2& px, double margin = 0.0) const {
    return px.x() >= margin && px.x() <= width - 1 - margin &&
           px.y() >= margin && px.y() <= height - 1 - margin;
  }

  /// d(projection)/d(camera-frame point), valid for z > kZMin.
  Mat23 projection_jacobian(const Vec3& p) const {
    const double iz = 1.0 / p.z();
    Mat23 J;
    J << fx * iz, 0.0, -fx * p.x() * iz * iz,  //
        0.0, fy * iz, -fy * p.y() * iz * iz;
    return J;
  }
};

}  // namespace dvio
