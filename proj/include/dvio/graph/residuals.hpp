#pragma once

#include "dvio/geometry/camera.hpp"
#include "dvio/geometry/pose.hpp"
#include "dvio/ordinal/ordinal.hpp"

namespace dvio {

// Pose increments are right-multiplied and ordered [translation; rotation]:
// R <- R * exp(rot^), t <- t + R * trans. All Jacobians below are w.r.t.
// these local coordinates.

struct ReprojectionEval {
  bool valid = false;  // false: point behind a camera, block dropped
  Vec2 r = Vec2::Zero();
  Mat26 J_anchor = Mat26::Zero();
  Mat26 J_obs = Mat26::Zero();
  Vec2 J_inv_depth = Vec2::Zero();
};

/// Back-projects the anchor-ray landmark, transforms it into the observing
/// camera, projects, and subtracts the measured pixel.
ReprojectionEval evaluate_reprojection(const Pose& T_w_anchor,
                                       const Pose& T_w_obs, const Camera& cam,
                                       const Vec2& anchor_px,
                                       const Vec2& obs_px, double inv_depth);

struct OdometryEval {
  Vec6 r = Vec6::Zero();  // [translation; rotation]
  Mat6 J_a = Mat6::Zero();
  Mat6 J_b = Mat6::Zero();
};

/// Relative-motion error log(measured^{-1} * (T_wa^{-1} * T_wb)) with a
/// decoupled translation/SO(3) logarithm. The rotation part lives in
/// [0, pi]; at the pi antipode the axis follows so3_log's branch.
OdometryEval evaluate_odometry(const Pose& T_wa, const Pose& T_wb,
                               const Pose& measured);

/// Unary depth-consistency residual d_state - aligned_prior (Jacobian is 1).
inline double evaluate_depth_residual(double inv_depth,
                                      double aligned_prior) {
  return inv_depth - aligned_prior;
}

}  // namespace dvio
