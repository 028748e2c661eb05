#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dvio/depth/affine.hpp"
#include "dvio/depth/depth_map.hpp"
#include "dvio/depth/gate.hpp"
#include "dvio/graph/solver.hpp"
#include "dvio/io/trajectory.hpp"

namespace dvio {

struct EstimatorOptions {
  int window_size = 10;
  bool enable_depth_residuals = false;
  bool enable_mdi = false;
  bool enable_ordinal = false;
  bool gating_enabled = true;
  double depth_weight = 300.0;  // w_D; effective block weight is w_D * w_gate
  double ema_alpha = 0.1;
  double mdi_tau_px = 3.0;
  double mdi_min_baseline = 0.01;
  double min_parallax_deg = 1.0;  // triangulation activation gate
  GateConfig gate;
  RansacConfig ransac;
  SolverConfig solver;  // solver.ordinal carries selection config and w_O
  std::uint64_t seed = 0;
  bool record_landmark_states = true;
};

/// One frame of measurements handed to the estimator. Every frame is treated
/// as a keyframe of the sliding window.
struct FrameInput {
  int index = 0;
  double timestamp = 0.0;
  const DepthMap* depth = nullptr;  // optional MDE prediction
  std::vector<std::pair<FeatureId, Vec2>> observations;
  std::optional<Pose> odom_from_prev;
  Vec6 odom_sqrt_info = Vec6::Ones();
};

struct LandmarkSnapshot {
  FeatureId id = -1;
  int anchor_frame = -1;
  double inv_depth = 0.0;
};

struct OrdinalPairUse {
  FeatureId id_i = -1;  // canonical order (id_i < id_j)
  FeatureId id_j = -1;
  int established_order = 0;
};

struct FrameDiagnostics {
  int frame_id = -1;
  double timestamp = 0.0;
  double solve_ms = 0.0;
  int iterations = 0;
  CostBreakdown initial_cost;
  CostBreakdown final_cost;
  int active_landmarks = 0;
  int reprojection_blocks = 0;
  int depth_blocks = 0;
  int ordinal_blocks = 0;
  bool solver_failed = false;
  double affine_s = 0.0;
  double affine_t = 0.0;
  bool affine_initialized = false;
  std::vector<OrdinalPairUse> ordinal_pairs;
  std::vector<LandmarkSnapshot> landmark_states;  // post-solve
};

struct ActivationRecord {
  FeatureId id = -1;
  int first_obs_frame = -1;
  int activation_frame = -1;
  bool via_mdi = false;
};

/// Sliding-window backend: ingest -> activate landmarks (triangulation or
/// depth-assisted initialization) -> align/gate priors -> select ordinal
/// pairs -> solve -> slide. Single-threaded per instance; the solve may
/// parallelize block evaluation internally.
class Estimator {
 public:
  Estimator(const Camera& cam, const EstimatorOptions& opts);

  void process(const FrameInput& frame);

  /// Finalized poses of evicted keyframes plus the current window.
  std::vector<StampedPose> trajectory() const;

  const std::vector<FrameDiagnostics>& diagnostics() const { return diags_; }
  const std::vector<ActivationRecord>& activations() const {
    return activations_;
  }
  const AffineState& affine_state() const { return affine_; }
  const WindowState& window() const { return window_; }
  bool solver_failed() const { return solver_failed_; }

 private:
  struct ObsSample {
    Vec2 px = Vec2::Zero();
    std::optional<double> raw_point;   // inverse units
    std::optional<double> raw_max5x5;  // foreground-biased patch sample
  };
  struct TrackData {
    int first_frame = -1;
    std::map<int, ObsSample> samples;        // frame id -> sample
    std::vector<PredictionSample> history;   // raw point samples over time
  };
  struct PairRecord {
    int order = 0;
    int verified = 0;
    bool blacklisted = false;
  };

  void ingest_observations(const FrameInput& frame);
  void activate_landmarks(const FrameInput& frame);
  void update_affine(const FrameInput& frame);
  std::vector<OrdinalPairUse> update_ordinal_pairs(const FrameInput& frame);
  FactorGraph build_graph(const std::vector<OrdinalPairUse>& pairs);
  void slide();

  int window_index(int frame_id) const;  // -1 when not in window
  std::optional<double> current_inv_depth(const Landmark& lm,
                                          const Pose& pose_cur) const;

  Camera cam_;
  EstimatorOptions opts_;
  WindowState window_;
  AffineState affine_;
  std::map<FeatureId, TrackData> tracks_;
  std::map<std::pair<FeatureId, FeatureId>, PairRecord> pair_registry_;
  std::map<int, std::pair<Pose, Vec6>> odom_meas_;  // frame id -> from prev
  std::vector<StampedPose> finalized_;
  std::vector<FrameDiagnostics> diags_;
  std::vector<ActivationRecord> activations_;
  bool solver_failed_ = false;
};

}  // namespace dvio
