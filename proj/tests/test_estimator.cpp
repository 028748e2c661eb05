#include <doctest.h>

#include "dvio/exp/experiment.hpp"

using namespace dvio;

namespace {

std::vector<StampedPose> gt_of(const SyntheticSequence& seq) {
  std::vector<StampedPose> gt;
  for (const auto& f : seq.frames) gt.push_back({f.timestamp, f.true_pose});
  return gt;
}

SyntheticSequence make_sequence(const std::string& preset_name,
                                std::uint64_t seed, int frames,
                                const Pose& world_transform = {}) {
  Preset p = *lookup_preset(preset_name);
  p.scene.seed = seed;
  p.scene.num_points = 200;
  return generate_sequence(p.scene, p.noise, default_camera(), frames,
                           world_transform);
}

bool identical_trajectories(const std::vector<StampedPose>& a,
                            const std::vector<StampedPose>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].pose.t != b[i].pose.t) return false;
    if (a[i].pose.q.coeffs() != b[i].pose.q.coeffs()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("noise-free sequence is tracked to numerical precision") {
  const auto seq = make_sequence("noise_free", 2, 60);
  ExperimentConfig cfg;
  const auto run = run_method_on_sequence(seq, MethodConfig{}, cfg);
  CHECK_FALSE(run.result.diverged);
  CHECK(run.result.ate_rmse < 1e-6);
}

TEST_CASE("prior machinery with zero weights reproduces the baseline bit-for-bit") {
  const auto seq = make_sequence("video_like", 5, 50);
  ExperimentConfig cfg;

  const auto baseline =
      run_method_on_sequence(seq, MethodConfig{"baseline"}, cfg);

  ExperimentConfig zero = cfg;
  zero.depth_weight = 0.0;
  zero.ordinal_weight = 0.0;
  MethodConfig enabled{"zero_weights", false, true, true, DiftMode::kOff};
  const auto zero_run = run_method_on_sequence(seq, enabled, zero);

  CHECK(identical_trajectories(baseline.trajectory, zero_run.trajectory));
}

TEST_CASE("repeated runs are bit-identical") {
  const auto seq = make_sequence("video_like", 9, 40);
  ExperimentConfig cfg;
  MethodConfig method{"depth_orc_mdi", true, true, true, DiftMode::kOff};
  const auto a = run_method_on_sequence(seq, method, cfg);
  const auto b = run_method_on_sequence(seq, method, cfg);
  CHECK(identical_trajectories(a.trajectory, b.trajectory));
}

TEST_CASE("rigid world transform leaves aligned ATE unchanged") {
  Pose transform;
  transform.q = so3_exp(Vec3(0.3, -0.2, 0.9));
  transform.t = Vec3(12.0, -7.0, 3.0);

  const auto seq_a = make_sequence("video_like", 11, 45);
  const auto seq_b = make_sequence("video_like", 11, 45, transform);

  ExperimentConfig cfg;
  MethodConfig method{"depth_mdi", true, true, false, DiftMode::kOff};
  const auto run_a = run_method_on_sequence(seq_a, method, cfg);
  const auto run_b = run_method_on_sequence(seq_b, method, cfg);

  REQUIRE(std::isfinite(run_a.result.ate_rmse));
  REQUIRE(std::isfinite(run_b.result.ate_rmse));
  CHECK(std::abs(run_a.result.ate_rmse - run_b.result.ate_rmse) < 1e-9);
}

TEST_CASE("depth-assisted initialization activates landmarks earlier") {
  const auto seq = make_sequence("video_like", 13, 60);
  ExperimentConfig cfg;
  const auto tri_only =
      run_method_on_sequence(seq, MethodConfig{"baseline"}, cfg);
  MethodConfig mdi{"mdi", true, false, false, DiftMode::kOff};
  const auto with_mdi = run_method_on_sequence(seq, mdi, cfg);

  CHECK(with_mdi.result.mdi_activations > 0);
  CHECK(with_mdi.result.mean_activation_latency <
        tri_only.result.mean_activation_latency);
}

TEST_CASE("estimator survives frames without depth maps") {
  const auto seq = make_sequence("video_like", 17, 25);
  EstimatorOptions opts;
  opts.enable_depth_residuals = true;
  opts.enable_mdi = true;
  opts.enable_ordinal = true;
  Estimator est(seq.camera, opts);
  for (const auto& frame : seq.frames) {
    FrameInput input;
    input.index = frame.index;
    input.timestamp = frame.timestamp;
    input.depth = frame.index % 2 == 0 ? &frame.depth : nullptr;
    for (const auto& obs : frame.observations) {
      input.observations.emplace_back(obs.feature_id, obs.px);
    }
    if (frame.index > 0) {
      input.odom_from_prev = frame.odom_measured;
      input.odom_sqrt_info = frame.odom_sqrt_info;
    }
    est.process(input);
  }
  CHECK_FALSE(est.solver_failed());
  const auto gt = gt_of(seq);
  const auto ate = ate_rmse(est.trajectory(), gt);
  REQUIRE(ate);
  CHECK(*ate < 1.0);
}
