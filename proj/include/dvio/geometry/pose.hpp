#pragma once

#include "dvio/core/types.hpp"

namespace dvio {

/// Skew-symmetric matrix such that hat(a) * b = a x b.
Mat3 hat(const Vec3& a);

/// SO(3) exponential map (axis-angle vector -> rotation), Taylor-safe near 0.
Quat so3_exp(const Vec3& phi);

/// SO(3) logarithm. Returns the rotation vector with angle in [0, pi].
/// At the pi antipode the axis sign follows the dominant quaternion component.
Vec3 so3_log(const Quat& q);

/// Inverse of the right Jacobian of SO(3) at phi. Diverges at |phi| = pi.
Mat3 so3_right_jacobian_inv(const Vec3& phi);

/// Rigid-body transform mapping local-frame points into the parent frame:
/// act(p) = R * p + t. For a keyframe this is T_wc (camera-to-world).
struct Pose {
  Quat q = Quat::Identity();
  Vec3 t = Vec3::Zero();

  static Pose identity() { return Pose{}; }

  Vec3 act(const Vec3& p) const { return q * p + t; }

  Pose inverse() const {
    const Quat qi = q.conjugate();
    return Pose{qi, -(qi * t)};
  }

  Pose compose(const Pose& other) const {
    return Pose{(q * other.q).normalized(), q * other.t + t};
  }

  Mat3 rotation() const { return q.toRotationMatrix(); }

  /// Right-multiplied increment, delta = [d_trans(3); d_rot(3)]:
  /// R <- R * exp(d_rot), t <- t + R * d_trans.
  Pose boxplus(const Vec6& delta) const {
    Pose out;
    out.q = (q * so3_exp(delta.tail<3>())).normalized();
    out.t = t + q * delta.head<3>();
    return out;
  }

  /// Relative transform taking frame-`other` points into this frame:
  /// this^{-1} * other.
  Pose between(const Pose& other) const { return inverse().compose(other); }
};

/// Similarity transform: act(p) = s * R * p + t.
struct Sim3 {
  double s = 1.0;
  Quat q = Quat::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 act(const Vec3& p) const { return s * (q * p) + t; }

  Sim3 inverse() const {
    const Quat qi = q.conjugate();
    return Sim3{1.0 / s, qi, -(qi * t) / s};
  }

  Sim3 compose(const Sim3& other) const {
    return Sim3{s * other.s, (q * other.q).normalized(), s * (q * other.t) + t};
  }
};

}  // namespace dvio
