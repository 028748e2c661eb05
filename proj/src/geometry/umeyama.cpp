#include "dvio/geometry/umeyama.hpp"

#include <Eigen/SVD>

namespace dvio {

std::optional<Sim3> umeyama_sim3(const std::vector<Vec3>& src,
                                 const std::vector<Vec3>& dst) {
  const std::size_t n = src.size();
  if (n < 3 || dst.size() != n) return std::nullopt;

  Vec3 mu_src = Vec3::Zero();
  Vec3 mu_dst = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    mu_src += src[i];
    mu_dst += dst[i];
  }
  mu_src /= static_cast<double>(n);
  mu_dst /= static_cast<double>(n);

  double var_src = 0.0;
  Mat3 sigma = Mat3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 xs = src[i] - mu_src;
    const Vec3 xd = dst[i] - mu_dst;
    var_src += xs.squaredNorm();
    sigma += xd * xs.transpose();
  }
  var_src /= static_cast<double>(n);
  sigma /= static_cast<double>(n);
  if (var_src <= 0.0) return std::nullopt;

  const Eigen::JacobiSVD<Mat3> svd(sigma,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 d = svd.singularValues();
  // Collinear points leave a rotation about the line unobservable.
  if (d(1) <= 1e-9 * d(0) || d(0) <= 0.0) return std::nullopt;

  Vec3 s_diag = Vec3::Ones();
  if (svd.matrixU().determinant() * svd.matrixV().determinant() < 0.0) {
    s_diag(2) = -1.0;
  }
  const Mat3 rot =
      svd.matrixU() * s_diag.asDiagonal() * svd.matrixV().transpose();
  const double scale = d.dot(s_diag) / var_src;
  if (!(scale > 0.0)) return std::nullopt;

  Sim3 out;
  out.s = scale;
  out.q = Quat(rot).normalized();
  out.t = mu_dst - scale * (rot * mu_src);
  return out;
}

}  // namespace dvio
