#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dvio/depth/depth_map.hpp"
#include "dvio/depth/dift.hpp"
#include "dvio/geometry/camera.hpp"
#include "dvio/geometry/pose.hpp"

namespace dvio {

enum class TrajectoryKind { kCircle, kLawnmower, kCorridor };

/// Deterministic synthetic world: a box room observed from a parametric
/// trajectory, with scattered feature-bearing points.
struct SceneConfig {
  std::uint64_t seed = 1;
  int num_points = 220;
  double extent = 6.0;  // room edge length, meters (box is centered)
  TrajectoryKind trajectory = TrajectoryKind::kCircle;
  double speed = 0.5;       // m/s
  double frame_rate = 10.0; // Hz
  double low_texture_fraction = 0.4;
  bool images = false;          // synthesize RGB frames
  int max_track_length = 40;    // frames before a track is retired
  double track_noise_px = 0.5;  // isotropic tracking noise
  double odom_sigma_t = 0.01;       // odometry noise, m per step
  double odom_sigma_r_deg = 0.1;    // odometry noise, deg per step
};

/// Parametric stand-in for an MDE network. The generated prediction obeys
/// prediction = (true_inverse_depth - t_k) / s_k (plus pixel noise and blob
/// artifacts), so aligning with the realized (s_k, t_k) recovers truth.
struct MdeNoiseModel {
  DepthMode mode = DepthMode::kAffineInverse;
  double scale_true = 2.0;
  double shift_true = 0.1;
  double sigma_s = 5e-4;          // per-frame random walk on s
  double sigma_t = 5e-4;          // per-frame random walk on t
  double flicker_sigma = 0.005;   // per-frame global jitter on (s, t)
  double pixel_noise_sigma = 0.01;  // relative, per pixel
  double outlier_blob_rate = 0.5;   // expected blobs per frame
  double blob_magnitude_lo = 0.3;
  double blob_magnitude_hi = 3.0;
};

struct Observation {
  FeatureId feature_id = -1;
  int point_index = -1;  // scene point behind this track
  Vec2 px = Vec2::Zero();
  double true_depth = 0.0;  // camera-frame z of the point (oracle data)
};

struct FrameBundle {
  int index = 0;
  double timestamp = 0.0;
  Pose true_pose;
  std::vector<Observation> observations;
  DepthMap depth;       // the synthetic MDE prediction
  Pose odom_measured;   // relative pose from the previous frame (index > 0)
  Vec6 odom_sqrt_info = Vec6::Ones();
  double s_realized = 1.0;  // affine parameters the frame was generated with
  double t_realized = 0.0;
  std::optional<ImageRgb8> image;
};

struct SyntheticSequence {
  Camera camera;
  SceneConfig scene;
  MdeNoiseModel noise;
  std::vector<Vec3> points;  // world positions of scene points
  std::vector<FrameBundle> frames;
};

Camera default_camera();

/// Ground-truth pose at frame index (camera-to-world).
Pose trajectory_pose(const SceneConfig& cfg, int index);

/// Renders the exact inverse-depth map seen from `pose` (box walls plus
/// point splats); the basis for the synthetic MDE prediction.
DepthMap render_true_inverse_depth(const SceneConfig& cfg,
                                   const std::vector<Vec3>& points,
                                   const Camera& cam, const Pose& pose);

/// Fully deterministic given (cfg.seed, cfg, noise). `world_transform`
/// rigidly relocates trajectory and scene together; camera-frame data is
/// unchanged by construction.
SyntheticSequence generate_sequence(const SceneConfig& cfg,
                                    const MdeNoiseModel& noise,
                                    const Camera& cam, int n_frames,
                                    const Pose& world_transform = {});

// Directory layout: meta.json, gt.csv (TUM), odom.csv, tracks.csv,
// frames/NNNNNN.dpm and optionally images/NNNNNN.ppm.
void save_sequence(const std::string& dir, const SyntheticSequence& seq);
SyntheticSequence load_sequence(const std::string& dir);

}  // namespace dvio
