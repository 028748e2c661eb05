#include "dvio/graph/residuals.hpp"

namespace dvio {

ReprojectionEval evaluate_reprojection(const Pose& T_w_anchor,
                                       const Pose& T_w_obs, const Camera& cam,
                                       const Vec2& anchor_px,
                                       const Vec2& obs_px, double inv_depth) {
  ReprojectionEval out;
  if (inv_depth <= 0.0) return out;

  const Vec3 ray = cam.unit_ray(anchor_px);
  const Vec3 p_anchor = ray / inv_depth;
  const Vec3 p_w = T_w_anchor.act(p_anchor);
  const Mat3 R_obs_t = T_w_obs.rotation().transpose();
  const Vec3 p_obs = R_obs_t * (p_w - T_w_obs.t);
  if (p_obs.z() <= Camera::kZMin) return out;

  const auto projected = cam.project(p_obs);
  if (!projected) return out;
  out.valid = true;
  out.r = *projected - obs_px;

  const Mat23 J_pi = cam.projection_jacobian(p_obs);
  const Mat3 R_anchor = T_w_anchor.rotation();
  const Mat3 R_oa = R_obs_t * R_anchor;  // anchor cam -> observing cam

  out.J_anchor.leftCols<3>() = J_pi * R_oa;
  out.J_anchor.rightCols<3>() = J_pi * (-R_oa * hat(p_anchor));
  out.J_obs.leftCols<3>() = -J_pi;
  out.J_obs.rightCols<3>() = J_pi * hat(p_obs);
  out.J_inv_depth = J_pi * (R_oa * (-ray / (inv_depth * inv_depth)));
  return out;
}

OdometryEval evaluate_odometry(const Pose& T_wa, const Pose& T_wb,
                               const Pose& measured) {
  OdometryEval out;
  const Pose rel = T_wa.between(T_wb);       // M = A^{-1} B
  const Pose err = measured.between(rel);    // E = Z^{-1} M
  out.r.head<3>() = err.t;
  const Vec3 phi = so3_log(err.q);
  out.r.tail<3>() = phi;

  const Mat3 R_z_t = measured.rotation().transpose();
  const Mat3 R_m = rel.rotation();
  const Mat3 Jr_inv = so3_right_jacobian_inv(phi);

  out.J_b.topLeftCorner<3, 3>() = err.rotation();
  out.J_b.bottomRightCorner<3, 3>() = Jr_inv;

  out.J_a.topLeftCorner<3, 3>() = -R_z_t;
  out.J_a.topRightCorner<3, 3>() = R_z_t * hat(rel.t);
  out.J_a.bottomRightCorner<3, 3>() = -Jr_inv * R_m.transpose();
  return out;
}

}  // namespace dvio
