#pragma once

#include <random>

#include "dvio/core/rng.hpp"
#include "dvio/graph/solver.hpp"

namespace dvio::testing {

struct WindowFixture {
  Camera cam;
  WindowState state;       // ground truth
  FactorGraph graph;       // noise-free measurements of the truth
  std::vector<Pose> true_poses;
  std::vector<double> true_inv_depths;  // by landmark id 0..n-1
};

/// Dense synthetic window: keyframes on a lateral arc, landmarks in front,
/// every landmark observed by every keyframe. Measurements are exact, so the
/// ground-truth state is the global optimum with zero cost.
inline WindowFixture make_dense_window(int n_keyframes, int n_landmarks,
                                       std::uint64_t seed,
                                       bool with_depth_blocks = false,
                                       bool with_ordinal_blocks = false,
                                       double depth_weight = 300.0,
                                       double ordinal_weight = 10.0) {
  WindowFixture fx;
  fx.cam.fx = 200.0;
  fx.cam.fy = 200.0;
  fx.cam.cx = 160.0;
  fx.cam.cy = 120.0;
  fx.cam.width = 320;
  fx.cam.height = 240;

  auto rng = make_engine(seed, 0xf1f1);
  std::uniform_real_distribution<double> ux(-2.0, 2.0);
  std::uniform_real_distribution<double> uy(-1.5, 1.5);
  std::uniform_real_distribution<double> uz(3.0, 9.0);
  std::normal_distribution<double> n01(0.0, 1.0);

  for (int i = 0; i < n_keyframes; ++i) {
    Keyframe kf;
    kf.frame_id = i;
    kf.timestamp = 0.1 * i;
    kf.pose.t = Vec3(0.12 * i, 0.02 * i, 0.01 * i);
    kf.pose.q = so3_exp(Vec3(0.002 * i, 0.004 * i, 0.001 * i));
    kf.fixed = (i == 0);
    fx.true_poses.push_back(kf.pose);
    fx.state.keyframes.push_back(kf);
  }

  std::vector<Vec3> points;
  for (int l = 0; l < n_landmarks; ++l) {
    // Keep sampling until the point is visible from every keyframe.
    for (;;) {
      const Vec3 p(ux(rng), uy(rng), uz(rng));
      bool ok = true;
      for (const auto& kf : fx.state.keyframes) {
        const auto px = fx.cam.project(kf.pose.inverse().act(p));
        if (!px || !fx.cam.in_bounds(*px, 2.0)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        points.push_back(p);
        break;
      }
    }
  }

  for (int l = 0; l < n_landmarks; ++l) {
    const int anchor = l % 2 == 0 ? 0 : 1 % n_keyframes;
    Landmark lm;
    lm.anchor_kf = anchor;
    const Pose& ap = fx.state.keyframes[anchor].pose;
    const Vec3 p_a = ap.inverse().act(points[l]);
    lm.inv_depth = 1.0 / p_a.z();
    fx.true_inv_depths.push_back(lm.inv_depth);
    for (int i = 0; i < n_keyframes; ++i) {
      const auto px = fx.cam.project(
          fx.state.keyframes[i].pose.inverse().act(points[l]));
      lm.obs[i] = *px;
    }
    // The anchor observation must reproduce the anchor ray exactly for the
    // truth to be the exact optimum.
    fx.state.landmarks.emplace(l, lm);
    for (int i = 0; i < n_keyframes; ++i) {
      if (i == anchor) continue;
      fx.graph.reprojection.push_back(
          ReprojectionBlock{l, anchor, i, lm.obs.at(anchor), lm.obs.at(i)});
    }
  }

  for (int i = 1; i < n_keyframes; ++i) {
    OdometryBlock blk;
    blk.kf_a = i - 1;
    blk.kf_b = i;
    blk.measured =
        fx.state.keyframes[i - 1].pose.between(fx.state.keyframes[i].pose);
    blk.sqrt_info.head<3>().setConstant(100.0);
    blk.sqrt_info.tail<3>().setConstant(500.0);
    fx.graph.odometry.push_back(blk);
  }

  if (with_depth_blocks) {
    for (int l = 0; l < n_landmarks; ++l) {
      fx.graph.depth.push_back(
          DepthBlock{l, fx.true_inv_depths[l], depth_weight});
    }
  }
  if (with_ordinal_blocks) {
    for (int l = 0; l + 1 < n_landmarks; l += 2) {
      const bool i_closer = fx.true_inv_depths[l] > fx.true_inv_depths[l + 1];
      OrdinalBlock blk;
      blk.feature_i = i_closer ? l : l + 1;
      blk.feature_j = i_closer ? l + 1 : l;
      blk.weight = ordinal_weight;
      fx.graph.ordinal.push_back(blk);
    }
  }
  return fx;
}

/// Random right-perturbation of every free pose and landmark.
inline void perturb_state(WindowState& state, double trans_m, double rot_rad,
                          double inv_depth_rel, std::uint64_t seed) {
  auto rng = make_engine(seed, 0xbadd);
  std::normal_distribution<double> n01(0.0, 1.0);
  for (auto& kf : state.keyframes) {
    if (kf.fixed) continue;
    Vec6 delta;
    for (int i = 0; i < 3; ++i) delta(i) = trans_m * n01(rng);
    for (int i = 3; i < 6; ++i) delta(i) = rot_rad * n01(rng);
    kf.pose = kf.pose.boxplus(delta);
  }
  for (auto& [id, lm] : state.landmarks) {
    lm.inv_depth *= 1.0 + inv_depth_rel * n01(rng);
  }
}

}  // namespace dvio::testing
