#include "dvio/geometry/pose.hpp"

#include <cmath>

namespace dvio {

Mat3 hat(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),  //
      a.z(), 0.0, -a.x(),   //
      -a.y(), a.x(), 0.0;
  return m;
}

Quat so3_exp(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  double half_sinc;  // sin(theta/2)/theta
  double cos_half;
  if (theta2 < 1e-14) {
    half_sinc = 0.5 - theta2 / 48.0;
    cos_half = 1.0 - theta2 / 8.0;
  } else {
    const double theta = std::sqrt(theta2);
    half_sinc = std::sin(0.5 * theta) / theta;
    cos_half = std::cos(0.5 * theta);
  }
  Quat q(cos_half, half_sinc * phi.x(), half_sinc * phi.y(),
         half_sinc * phi.z());
  return q.normalized();
}

Vec3 so3_log(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() *= -1.0;  // angle in [0, pi]
  const Vec3 v(q.x(), q.y(), q.z());
  const double vn = v.norm();
  const double w = q.w();
  if (vn < 1e-12) return 2.0 * v;  // ~identity
  const double theta = 2.0 * std::atan2(vn, w);
  return (theta / vn) * v;
}

Mat3 so3_right_jacobian_inv(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const Mat3 px = hat(phi);
  if (theta2 < 1e-12) {
    return Mat3::Identity() + 0.5 * px + (1.0 / 12.0) * px * px;
  }
  const double theta = std::sqrt(theta2);
  const double c = 1.0 / theta2 -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * px + c * px * px;
}

}  // namespace dvio
