#include "dvio/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dvio/core/rng.hpp"

namespace dvio {

namespace {

// RNG stream tags; each (seed, tag + frame) pair yields an independent engine.
constexpr std::uint64_t kStreamPoints = 0x11110000;
constexpr std::uint64_t kStreamWalk = 0x22220000;
constexpr std::uint64_t kStreamFlicker = 0x33330000;
constexpr std::uint64_t kStreamPixel = 0x44440000;
constexpr std::uint64_t kStreamBlob = 0x55550000;
constexpr std::uint64_t kStreamTrack = 0x66660000;
constexpr std::uint64_t kStreamOdom = 0x77770000;
constexpr std::uint64_t kStreamImage = 0x88880000;

constexpr double kZNear = 0.3;        // visibility cull, meters
constexpr double kVisMarginPx = 6.0;  // keep noisy observations in bounds
constexpr int kSplatRadiusPx = 3;

double triangle_wave(double s, double lo, double hi) {
  const double range = hi - lo;
  const double period = 2.0 * range;
  double phase = std::fmod(s, period);
  if (phase < 0.0) phase += period;
  return lo + (phase < range ? phase : period - phase);
}

Quat look_rotation(const Vec3& forward) {
  const Vec3 z = forward.normalized();
  Vec3 x = z.cross(Vec3(0.0, 0.0, 1.0));
  if (x.norm() < 1e-9) x = Vec3(1.0, 0.0, 0.0);  // looking straight up/down
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 R;
  R.col(0) = x;
  R.col(1) = y;
  R.col(2) = z;
  return Quat(R).normalized();
}

std::uint64_t cell_hash(int cx, int cy, int cz) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (std::uint64_t v :
       {static_cast<std::uint64_t>(static_cast<std::int64_t>(cx)),
        static_cast<std::uint64_t>(static_cast<std::int64_t>(cy)),
        static_cast<std::uint64_t>(static_cast<std::int64_t>(cz))}) {
    h = splitmix64(h ^ v);
  }
  return h;
}

// Depth (camera z) where the pixel ray exits the box room. The camera is
// assumed inside the box, so the exit is the smallest positive face hit.
double box_exit_depth(const Pose& pose, const Vec3& unit_ray, double half) {
  const Vec3 dir = pose.q * unit_ray;  // not normalized; z-depth parameter
  double best = 1e9;
  for (int axis = 0; axis < 3; ++axis) {
    if (std::abs(dir(axis)) < 1e-12) continue;
    const double face = dir(axis) > 0.0 ? half : -half;
    const double z = (face - pose.t(axis)) / dir(axis);
    if (z > 0.0) best = std::min(best, z);
  }
  return best;
}

// Camera z-buffer of the scene: box walls plus point splats.
std::vector<float> render_depth_buffer(const SceneConfig& cfg,
                                       const std::vector<Vec3>& points,
                                       const Camera& cam, const Pose& pose) {
  const double half = 0.5 * cfg.extent;
  std::vector<float> zbuf(static_cast<std::size_t>(cam.width) * cam.height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const Vec3 ray = cam.unit_ray(Vec2(x, y));
      zbuf[static_cast<std::size_t>(y) * cam.width + x] =
          static_cast<float>(box_exit_depth(pose, ray, half));
    }
  }

  const Pose w2c = pose.inverse();
  for (const Vec3& p : points) {
    const Vec3 pc = w2c.act(p);
    if (pc.z() < kZNear) continue;
    const auto px = cam.project(pc);
    if (!px) continue;
    const int cx = static_cast<int>(std::lround(px->x()));
    const int cy = static_cast<int>(std::lround(px->y()));
    for (int dy = -kSplatRadiusPx; dy <= kSplatRadiusPx; ++dy) {
      for (int dx = -kSplatRadiusPx; dx <= kSplatRadiusPx; ++dx) {
        if (dx * dx + dy * dy > kSplatRadiusPx * kSplatRadiusPx) continue;
        const int ix = cx + dx;
        const int iy = cy + dy;
        if (ix < 0 || ix >= cam.width || iy < 0 || iy >= cam.height) continue;
        float& z = zbuf[static_cast<std::size_t>(iy) * cam.width + ix];
        z = std::min(z, static_cast<float>(pc.z()));
      }
    }
  }
  return zbuf;
}

ImageRgb8 render_image(const SceneConfig& cfg, const Camera& cam,
                       const Pose& pose, const std::vector<float>& zbuf,
                       std::mt19937_64& rng) {
  ImageRgb8 img = ImageRgb8::create(cam.width, cam.height);
  const double cell_size = 0.75;
  std::uniform_real_distribution<double> tex(-8.0, 8.0);
  const auto low_cut =
      static_cast<std::uint64_t>(cfg.low_texture_fraction * 1000.0);
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const double z = zbuf[static_cast<std::size_t>(y) * cam.width + x];
      const Vec3 w = pose.act(cam.unit_ray(Vec2(x, y)) * z);
      const std::uint64_t h =
          cell_hash(static_cast<int>(std::floor(w.x() / cell_size)),
                    static_cast<int>(std::floor(w.y() / cell_size)),
                    static_cast<int>(std::floor(w.z() / cell_size)));
      const bool low_texture = (h % 1000) < low_cut;
      double v;
      if (low_texture) {
        v = 128.0;  // flat albedo, no texture noise
      } else {
        v = 60.0 + static_cast<double>((h >> 12) % 140) + tex(rng);
      }
      const auto u8 = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
      img.at(x, y, 0) = u8;
      img.at(x, y, 1) = u8;
      img.at(x, y, 2) = u8;
    }
  }
  return img;
}

}  // namespace

Camera default_camera() {
  Camera cam;
  cam.fx = 200.0;
  cam.fy = 200.0;
  cam.cx = 160.0;
  cam.cy = 120.0;
  cam.width = 320;
  cam.height = 240;
  return cam;
}

Pose trajectory_pose(const SceneConfig& cfg, int index) {
  const double h = 0.5 * cfg.extent;
  const double s = cfg.speed * static_cast<double>(index) / cfg.frame_rate;
  Pose pose;
  switch (cfg.trajectory) {
    case TrajectoryKind::kCircle: {
      const double r = 0.55 * h;
      const double theta = s / r;
      pose.t = Vec3(r * std::cos(theta), r * std::sin(theta), 0.0);
      pose.q = look_rotation(Vec3(std::cos(theta), std::sin(theta), 0.0));
      break;
    }
    case TrajectoryKind::kLawnmower: {
      const double y = triangle_wave(s, -0.5 * h, 0.5 * h);
      const double z = 0.2 * h * std::sin(0.3 * s / h);
      pose.t = Vec3(0.0, y, z);
      pose.q = look_rotation(Vec3(1.0, 0.0, 0.0));
      break;
    }
    case TrajectoryKind::kCorridor: {
      const double y = std::min(-0.75 * h + s, 0.9 * h);
      pose.t = Vec3(0.1 * h * std::sin(1.2 * s / h), y, 0.0);
      pose.q = look_rotation(Vec3(0.0, 1.0, 0.0));
      break;
    }
  }
  return pose;
}

DepthMap render_true_inverse_depth(const SceneConfig& cfg,
                                   const std::vector<Vec3>& points,
                                   const Camera& cam, const Pose& pose) {
  const auto zbuf = render_depth_buffer(cfg, points, cam, pose);
  DepthMap map = DepthMap::create(cam.width, cam.height,
                                  DepthMode::kAffineInverse);
  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    map.values[i] = 1.0f / std::max(zbuf[i], 1e-3f);
  }
  return map;
}

SyntheticSequence generate_sequence(const SceneConfig& cfg,
                                    const MdeNoiseModel& noise,
                                    const Camera& cam, int n_frames,
                                    const Pose& world_transform) {
  SyntheticSequence seq;
  seq.camera = cam;
  seq.scene = cfg;
  seq.noise = noise;

  {
    auto rng = make_engine(cfg.seed, kStreamPoints);
    std::uniform_real_distribution<double> u(-0.95 * 0.5 * cfg.extent,
                                             0.95 * 0.5 * cfg.extent);
    seq.points.reserve(cfg.num_points);
    for (int i = 0; i < cfg.num_points; ++i) {
      const double x = u(rng), y = u(rng), z = u(rng);
      seq.points.push_back(world_transform.act(Vec3(x, y, z)));
    }
  }

  struct TrackState {
    FeatureId fid = -1;
    int run = 0;
    int cooldown = 0;
  };
  std::vector<TrackState> tracks(seq.points.size());
  FeatureId next_id = 0;

  // Affine random walk shared by all frames (drift), realized serially.
  double s_walk = noise.scale_true;
  double t_walk = noise.shift_true;

  Pose prev_pose;
  for (int k = 0; k < n_frames; ++k) {
    FrameBundle frame;
    frame.index = k;
    frame.timestamp = static_cast<double>(k) / cfg.frame_rate;
    frame.true_pose = world_transform.compose(trajectory_pose(cfg, k));

    // Feature tracks with lifetime management and tracking noise.
    {
      auto rng = make_engine(cfg.seed, kStreamTrack + k);
      std::normal_distribution<double> jitter(0.0, 1.0);
      const Pose w2c = frame.true_pose.inverse();
      for (std::size_t i = 0; i < seq.points.size(); ++i) {
        TrackState& ts = tracks[i];
        const Vec3 pc = w2c.act(seq.points[i]);
        bool visible = pc.z() > kZNear;
        std::optional<Vec2> px;
        if (visible) {
          px = cam.project(pc);
          visible = px && cam.in_bounds(*px, kVisMarginPx);
        }
        if (!visible || ts.cooldown > 0) {
          if (ts.cooldown > 0) --ts.cooldown;
          ts.fid = -1;
          ts.run = 0;
          continue;
        }
        if (ts.fid < 0) {
          ts.fid = next_id++;
          ts.run = 0;
        }
        ++ts.run;
        Vec2 obs_px = *px;
        if (cfg.track_noise_px > 0.0) {
          obs_px.x() += cfg.track_noise_px * jitter(rng);
          obs_px.y() += cfg.track_noise_px * jitter(rng);
          obs_px.x() = std::clamp(obs_px.x(), 0.0, cam.width - 1.0);
          obs_px.y() = std::clamp(obs_px.y(), 0.0, cam.height - 1.0);
        }
        frame.observations.push_back(
            Observation{ts.fid, static_cast<int>(i), obs_px, pc.z()});
        if (ts.run >= cfg.max_track_length) {
          ts.fid = -1;
          ts.run = 0;
          ts.cooldown = 4;
        }
      }
    }

    // Realized affine parameters: slow random walk plus per-frame flicker.
    {
      auto walk_rng = make_engine(cfg.seed, kStreamWalk + k);
      std::normal_distribution<double> n01(0.0, 1.0);
      if (k > 0) {
        s_walk = std::max(0.05, s_walk + noise.sigma_s * n01(walk_rng));
        t_walk += noise.sigma_t * n01(walk_rng);
      }
      auto flick_rng = make_engine(cfg.seed, kStreamFlicker + k);
      frame.s_realized =
          std::max(0.05, s_walk + noise.flicker_sigma * n01(flick_rng));
      frame.t_realized = t_walk + noise.flicker_sigma * n01(flick_rng);
    }

    // Synthetic MDE prediction from the exact depth buffer.
    const auto zbuf = render_depth_buffer(cfg, seq.points, cam,
                                          frame.true_pose);
    frame.depth = DepthMap::create(cam.width, cam.height, noise.mode);
    {
      const double inv_s = 1.0 / frame.s_realized;
      const auto n_px = static_cast<std::int64_t>(zbuf.size());
#pragma omp parallel for schedule(static)
      for (std::int64_t i = 0; i < n_px; ++i) {
        const double d_inv = 1.0 / std::max<double>(zbuf[i], 1e-3);
        frame.depth.values[i] =
            static_cast<float>((d_inv - frame.t_realized) * inv_s);
      }
      if (noise.pixel_noise_sigma > 0.0) {
        auto rng = make_engine(cfg.seed, kStreamPixel + k);
        std::normal_distribution<double> n01(0.0, 1.0);
        for (auto& v : frame.depth.values) {
          v *= static_cast<float>(1.0 + noise.pixel_noise_sigma * n01(rng));
        }
      }
      if (noise.outlier_blob_rate > 0.0) {
        auto rng = make_engine(cfg.seed, kStreamBlob + k);
        std::poisson_distribution<int> count(noise.outlier_blob_rate);
        std::uniform_real_distribution<double> ux(0.0, cam.width - 1.0);
        std::uniform_real_distribution<double> uy(0.0, cam.height - 1.0);
        std::uniform_real_distribution<double> ur(5.0, 20.0);
        std::uniform_real_distribution<double> um(noise.blob_magnitude_lo,
                                                  noise.blob_magnitude_hi);
        const int blobs = count(rng);
        for (int bi = 0; bi < blobs; ++bi) {
          const double bx = ux(rng), by = uy(rng), br = ur(rng);
          const double mult = um(rng);
          const int x0 = std::max(0, static_cast<int>(bx - br));
          const int x1 = std::min(cam.width - 1, static_cast<int>(bx + br));
          const int y0 = std::max(0, static_cast<int>(by - br));
          const int y1 = std::min(cam.height - 1, static_cast<int>(by + br));
          for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
              const double dx = x - bx, dy = y - by;
              if (dx * dx + dy * dy <= br * br) {
                frame.depth.at(x, y) *= static_cast<float>(mult);
              }
            }
          }
        }
      }
      if (noise.mode == DepthMode::kMetric) {
        for (auto& v : frame.depth.values) {
          v = 1.0f / std::max(v, 1e-4f);
        }
      }
    }

    if (cfg.images) {
      auto rng = make_engine(cfg.seed, kStreamImage + k);
      frame.image = render_image(cfg, cam, frame.true_pose, zbuf, rng);
    }

    // Noisy metric odometry between consecutive frames.
    if (k > 0) {
      const Pose rel = prev_pose.between(frame.true_pose);
      auto rng = make_engine(cfg.seed, kStreamOdom + k);
      std::normal_distribution<double> n01(0.0, 1.0);
      Vec6 xi = Vec6::Zero();
      const double sr = cfg.odom_sigma_r_deg * M_PI / 180.0;
      for (int i = 0; i < 3; ++i) xi(i) = cfg.odom_sigma_t * n01(rng);
      for (int i = 3; i < 6; ++i) xi(i) = sr * n01(rng);
      frame.odom_measured = rel.compose(Pose::identity().boxplus(xi));
      const double st_eff = std::max(cfg.odom_sigma_t, 1e-4);
      const double sr_eff = std::max(sr, 1e-5);
      frame.odom_sqrt_info.head<3>().setConstant(1.0 / st_eff);
      frame.odom_sqrt_info.tail<3>().setConstant(1.0 / sr_eff);
    }

    prev_pose = frame.true_pose;
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

}  // namespace dvio
