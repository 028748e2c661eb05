#include "dvio/geometry/triangulate.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>

namespace dvio {

namespace {

void set_status(TriangulateStatus* status, TriangulateStatus value) {
  if (status) *status = value;
}

double reprojection_error(const Pose& pose_a, const Pose& pose_b,
                          const Camera& cam, const Vec2& obs_a,
                          const Vec2& obs_b, const Vec3& point_w) {
  const auto pa = cam.project(pose_a.inverse().act(point_w));
  const auto pb = cam.project(pose_b.inverse().act(point_w));
  if (!pa || !pb) return std::numeric_limits<double>::infinity();
  return (*pa - obs_a).norm() + (*pb - obs_b).norm();
}

// Closest point between the two viewing rays (world frame).
std::optional<Vec3> midpoint_candidate(const Pose& pose_a, const Pose& pose_b,
                                       const Vec3& ray_a_w,
                                       const Vec3& ray_b_w) {
  const Vec3 oa = pose_a.t;
  const Vec3 ob = pose_b.t;
  const double a_dot_b = ray_a_w.dot(ray_b_w);
  const double aa = ray_a_w.squaredNorm();
  const double bb = ray_b_w.squaredNorm();
  const double det = aa * bb - a_dot_b * a_dot_b;
  if (det < 1e-16) return std::nullopt;
  const Vec3 d = ob - oa;
  const double la = (d.dot(ray_a_w) * bb - d.dot(ray_b_w) * a_dot_b) / det;
  const double lb = (d.dot(ray_a_w) * a_dot_b - d.dot(ray_b_w) * aa) / det;
  return Vec3(0.5 * ((oa + la * ray_a_w) + (ob + lb * ray_b_w)));
}

std::optional<Vec3> dlt_candidate(const Pose& pose_a, const Pose& pose_b,
                                  const Camera& cam, const Vec2& obs_a,
                                  const Vec2& obs_b) {
  // Rows of [x*P3 - P1; y*P3 - P2] for each view, with P = [R | t] of the
  // world-to-camera transform and normalized image coordinates.
  Eigen::Matrix<double, 4, 4> A;
  const Pose wa = pose_a.inverse();
  const Pose wb = pose_b.inverse();
  auto fill = [&](int row, const Pose& wc, const Vec2& obs) {
    Eigen::Matrix<double, 3, 4> P;
    P.leftCols<3>() = wc.rotation();
    P.rightCols<1>() = wc.t;
    const Vec3 n = cam.unit_ray(obs);
    A.row(row) = n.x() * P.row(2) - P.row(0);
    A.row(row + 1) = n.y() * P.row(2) - P.row(1);
  };
  fill(0, wa, obs_a);
  fill(2, wb, obs_b);
  const Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d h = svd.matrixV().col(3);
  if (std::abs(h(3)) < 1e-12) return std::nullopt;
  return Vec3(h.head<3>() / h(3));
}

}  // namespace

double parallax_deg(const Pose& pose_a, const Pose& pose_b, const Camera& cam,
                    const Vec2& obs_a, const Vec2& obs_b) {
  const Vec3 ra = (pose_a.q * cam.unit_ray(obs_a)).normalized();
  const Vec3 rb = (pose_b.q * cam.unit_ray(obs_b)).normalized();
  const double c = std::clamp(ra.dot(rb), -1.0, 1.0);
  return std::acos(c) * 180.0 / M_PI;
}

std::optional<double> triangulate(const Pose& pose_a, const Pose& pose_b,
                                  const Camera& cam, const Vec2& obs_a,
                                  const Vec2& obs_b,
                                  const TriangulateOptions& opts,
                                  TriangulateStatus* status) {
  if (parallax_deg(pose_a, pose_b, cam, obs_a, obs_b) <
      opts.min_parallax_deg) {
    set_status(status, TriangulateStatus::kInsufficientParallax);
    return std::nullopt;
  }

  const Vec3 ray_a_w = pose_a.q * cam.unit_ray(obs_a);
  const Vec3 ray_b_w = pose_b.q * cam.unit_ray(obs_b);

  Vec3 best_point = Vec3::Zero();
  double best_err = std::numeric_limits<double>::infinity();
  for (const auto& cand :
       {midpoint_candidate(pose_a, pose_b, ray_a_w, ray_b_w),
        dlt_candidate(pose_a, pose_b, cam, obs_a, obs_b)}) {
    if (!cand) continue;
    const double err =
        reprojection_error(pose_a, pose_b, cam, obs_a, obs_b, *cand);
    if (err < best_err) {
      best_err = err;
      best_point = *cand;
    }
  }

  if (!std::isfinite(best_err)) {
    set_status(status, TriangulateStatus::kNegativeDepth);
    return std::nullopt;
  }
  const double z = pose_a.inverse().act(best_point).z();
  if (z <= Camera::kZMin) {
    set_status(status, TriangulateStatus::kNegativeDepth);
    return std::nullopt;
  }
  set_status(status, TriangulateStatus::kOk);
  return 1.0 / z;
}

}  // namespace dvio
