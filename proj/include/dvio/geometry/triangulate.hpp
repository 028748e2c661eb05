#pragma once

#include <optional>

#include "dvio/geometry/camera.hpp"
#include "dvio/geometry/pose.hpp"

namespace dvio {

enum class TriangulateStatus {
  kOk,
  kInsufficientParallax,
  kNegativeDepth,
};

struct TriangulateOptions {
  double min_parallax_deg = 1.0;  // minimum ray angle between the two views
};

/// Ray angle (degrees) between the two observations, measured in world frame.
double parallax_deg(const Pose& pose_a, const Pose& pose_b, const Camera& cam,
                    const Vec2& obs_a, const Vec2& obs_b);

/// Two-view triangulation. Poses are camera-to-world; observations are pixels.
/// Returns the inverse depth of the point in frame a. Candidates from the
/// ray-midpoint and DLT constructions are scored by total reprojection error
/// and the better one is returned.
std::optional<double> triangulate(const Pose& pose_a, const Pose& pose_b,
                                  const Camera& cam, const Vec2& obs_a,
                                  const Vec2& obs_b,
                                  const TriangulateOptions& opts = {},
                                  TriangulateStatus* status = nullptr);

}  // namespace dvio
