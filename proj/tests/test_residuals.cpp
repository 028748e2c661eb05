#include <doctest.h>

#include <random>

#include "dvio/core/rng.hpp"
#include "dvio/graph/residuals.hpp"

using namespace dvio;

namespace {

Camera test_camera() { return Camera{200.0, 200.0, 160.0, 120.0, 320, 240}; }

Pose random_pose(std::mt19937_64& rng, double trans, double rot) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, rot);
  Pose p;
  p.t = trans * Vec3(n01(rng), n01(rng), n01(rng));
  Vec3 axis(n01(rng), n01(rng), n01(rng));
  if (axis.norm() < 1e-9) axis = Vec3(1, 0, 0);
  p.q = so3_exp(axis.normalized() * angle(rng));
  return p;
}

double rel_err(const Eigen::MatrixXd& analytic, const Eigen::MatrixXd& fd) {
  const double denom = std::max(1.0, analytic.cwiseAbs().maxCoeff());
  return (analytic - fd).cwiseAbs().maxCoeff() / denom;
}

}  // namespace

TEST_CASE("reprojection residual vanishes on exact data") {
  const Camera cam = test_camera();
  auto rng = make_engine(1, 40);
  for (int i = 0; i < 50; ++i) {
    const Pose T_a = random_pose(rng, 0.5, 0.3);
    Pose T_b = T_a;
    T_b.t += Vec3(0.4, 0.05, -0.1);
    const Vec3 p_a(0.2, -0.1, 4.0);  // in anchor camera
    const auto anchor_px = cam.project(p_a);
    const auto obs_px = cam.project(T_b.inverse().act(T_a.act(p_a)));
    if (!anchor_px || !obs_px) continue;
    const auto ev = evaluate_reprojection(T_a, T_b, cam, *anchor_px, *obs_px,
                                          1.0 / p_a.z());
    REQUIRE(ev.valid);
    CHECK(ev.r.norm() < 1e-9);
  }
}

TEST_CASE("reprojection at the anchor frame ignores depth") {
  const Camera cam = test_camera();
  const Pose T = Pose{};
  const Vec2 px(170.0, 115.0);
  const auto ev = evaluate_reprojection(T, T, cam, px, px, 0.25);
  REQUIRE(ev.valid);
  CHECK(ev.r.norm() < 1e-12);
  CHECK(ev.J_inv_depth.norm() < 1e-9);  // motion along the ray is invisible
}

TEST_CASE("reprojection jacobians match finite differences") {
  const Camera cam = test_camera();
  auto rng = make_engine(2, 41);
  std::uniform_real_distribution<double> ud(0.1, 0.6);
  std::uniform_real_distribution<double> upx(30.0, 290.0);
  std::uniform_real_distribution<double> upy(30.0, 210.0);
  const double h = 1e-6;

  int tested = 0;
  while (tested < 300) {
    const Pose T_a = random_pose(rng, 1.0, 0.8);
    const Pose T_b = random_pose(rng, 1.0, 0.8);
    const Vec2 anchor_px(upx(rng), upy(rng));
    const Vec2 obs_px(upx(rng), upy(rng));
    const double inv_depth = ud(rng);
    const auto ev =
        evaluate_reprojection(T_a, T_b, cam, anchor_px, obs_px, inv_depth);
    if (!ev.valid) continue;
    ++tested;

    Mat26 fd_a, fd_b;
    for (int k = 0; k < 6; ++k) {
      Vec6 delta = Vec6::Zero();
      delta(k) = h;
      const auto plus = evaluate_reprojection(T_a.boxplus(delta), T_b, cam,
                                              anchor_px, obs_px, inv_depth);
      const auto minus = evaluate_reprojection(T_a.boxplus(-delta), T_b, cam,
                                               anchor_px, obs_px, inv_depth);
      REQUIRE(plus.valid);
      REQUIRE(minus.valid);
      fd_a.col(k) = (plus.r - minus.r) / (2.0 * h);
      const auto plus_b = evaluate_reprojection(T_a, T_b.boxplus(delta), cam,
                                                anchor_px, obs_px, inv_depth);
      const auto minus_b = evaluate_reprojection(
          T_a, T_b.boxplus(-delta), cam, anchor_px, obs_px, inv_depth);
      REQUIRE(plus_b.valid);
      REQUIRE(minus_b.valid);
      fd_b.col(k) = (plus_b.r - minus_b.r) / (2.0 * h);
    }
    CHECK(rel_err(ev.J_anchor, fd_a) < 1e-5);
    CHECK(rel_err(ev.J_obs, fd_b) < 1e-5);

    const auto dp = evaluate_reprojection(T_a, T_b, cam, anchor_px, obs_px,
                                          inv_depth + h);
    const auto dm = evaluate_reprojection(T_a, T_b, cam, anchor_px, obs_px,
                                          inv_depth - h);
    REQUIRE(dp.valid);
    REQUIRE(dm.valid);
    const Vec2 fd_d = (dp.r - dm.r) / (2.0 * h);
    CHECK(rel_err(ev.J_inv_depth, fd_d) < 1e-5);
  }
}

TEST_CASE("odometry residual basics") {
  Pose a, b, meas;
  b.t = Vec3(1.0, 0.2, -0.3);
  b.q = so3_exp(Vec3(0.1, -0.2, 0.3));
  meas = a.between(b);
  const auto exact = evaluate_odometry(a, b, meas);
  CHECK(exact.r.norm() < 1e-12);

  // Pure translation offset shows up in the translation block.
  Pose b2 = b;
  b2.t += b.q * Vec3(0.1, 0.0, 0.0);
  const auto off = evaluate_odometry(a, b2, meas);
  CHECK(off.r.head<3>().x() == doctest::Approx(0.1));
  CHECK(off.r.head<3>().tail<2>().norm() < 1e-12);
  CHECK(off.r.tail<3>().norm() < 1e-12);

  // 180 degree rotation discrepancy has rotation-block norm pi.
  Pose b3 = b;
  b3.q = (b.q * so3_exp(Vec3(M_PI, 0, 0))).normalized();
  const auto anti = evaluate_odometry(a, b3, meas);
  CHECK(anti.r.tail<3>().norm() == doctest::Approx(M_PI).epsilon(1e-9));
}

TEST_CASE("odometry jacobians match finite differences") {
  auto rng = make_engine(3, 42);
  const double h = 1e-6;
  for (int i = 0; i < 300; ++i) {
    const Pose a = random_pose(rng, 2.0, 1.5);
    const Pose b = random_pose(rng, 2.0, 1.5);
    const Pose meas = random_pose(rng, 0.3, 0.4);
    const auto ev = evaluate_odometry(a, b, meas);
    if (ev.r.tail<3>().norm() > 3.0) continue;  // keep clear of the pi branch

    Mat6 fd_a, fd_b;
    for (int k = 0; k < 6; ++k) {
      Vec6 delta = Vec6::Zero();
      delta(k) = h;
      fd_a.col(k) = (evaluate_odometry(a.boxplus(delta), b, meas).r -
                     evaluate_odometry(a.boxplus(-delta), b, meas).r) /
                    (2.0 * h);
      fd_b.col(k) = (evaluate_odometry(a, b.boxplus(delta), meas).r -
                     evaluate_odometry(a, b.boxplus(-delta), meas).r) /
                    (2.0 * h);
    }
    CHECK(rel_err(ev.J_a, fd_a) < 1e-5);
    CHECK(rel_err(ev.J_b, fd_b) < 1e-5);
  }
}

TEST_CASE("depth residual") {
  CHECK(evaluate_depth_residual(0.7, 0.7) == doctest::Approx(0.0));
  // d_k = 0.5 against aligned prior 2 * 0.3 + 0.1 = 0.7.
  CHECK(evaluate_depth_residual(0.5, 2.0 * 0.3 + 0.1) ==
        doctest::Approx(-0.2));
}
