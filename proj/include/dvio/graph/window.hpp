#pragma once

#include <map>
#include <vector>

#include "dvio/geometry/camera.hpp"
#include "dvio/geometry/pose.hpp"

namespace dvio {

struct Keyframe {
  int frame_id = -1;
  double timestamp = 0.0;
  Pose pose;          // camera-to-world
  bool fixed = false; // held constant in the solve (gauge)
};

/// Landmark parameterized by inverse depth along the ray of its anchor
/// keyframe observation.
struct Landmark {
  int anchor_kf = -1;            // index into WindowState::keyframes
  double inv_depth = 0.0;        // 1/m in the anchor camera
  std::map<int, Vec2> obs;       // keyframe index -> pixel observation
};

/// Sliding-window estimator state. Ordered landmark map keeps every
/// iteration order deterministic.
struct WindowState {
  std::vector<Keyframe> keyframes;
  std::map<FeatureId, Landmark> landmarks;

  int fixed_count() const {
    int n = 0;
    for (const auto& kf : keyframes) n += kf.fixed ? 1 : 0;
    return n;
  }
};

/// Evicts the oldest keyframe once the window exceeds `window_size`
/// (no-op otherwise). Landmarks anchored there are re-expressed in the next
/// keyframe observing them via exact geometric transfer of the anchor-ray
/// point, or dropped when unobserved elsewhere. The new oldest pose becomes
/// the fixed gauge reference (fixed-lag approximation).
void marginalize_slide(WindowState& state, const Camera& cam, int window_size);

}  // namespace dvio
