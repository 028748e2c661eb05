#include "dvio/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "dvio/core/rng.hpp"
#include "dvio/geometry/triangulate.hpp"
#include "dvio/ordinal/ordinal.hpp"

namespace dvio {

Estimator::Estimator(const Camera& cam, const EstimatorOptions& opts)
    : cam_(cam), opts_(opts) {
  affine_.alpha = opts.ema_alpha;
}

int Estimator::window_index(int frame_id) const {
  for (int i = 0; i < static_cast<int>(window_.keyframes.size()); ++i) {
    if (window_.keyframes[i].frame_id == frame_id) return i;
  }
  return -1;
}

std::optional<double> Estimator::current_inv_depth(
    const Landmark& lm, const Pose& pose_cur) const {
  const auto anchor_obs = lm.obs.find(lm.anchor_kf);
  if (anchor_obs == lm.obs.end() || lm.inv_depth <= 0.0) return std::nullopt;
  const Vec3 p_w = window_.keyframes[lm.anchor_kf].pose.act(
      cam_.unit_ray(anchor_obs->second) / lm.inv_depth);
  const double z = pose_cur.inverse().act(p_w).z();
  if (z <= Camera::kZMin) return std::nullopt;
  return 1.0 / z;
}

void Estimator::ingest_observations(const FrameInput& frame) {
  const int cur_kf = static_cast<int>(window_.keyframes.size()) - 1;
  const int history_cap = std::max(opts_.window_size, opts_.gate.window) + 2;

  for (const auto& [fid, px] : frame.observations) {
    TrackData& track = tracks_[fid];
    if (track.first_frame < 0) track.first_frame = frame.index;

    ObsSample sample;
    sample.px = px;
    if (frame.depth) {
      if (auto raw = sample_depth(*frame.depth, px, SampleMode::kPoint)) {
        sample.raw_point = to_inverse_units(*raw, frame.depth->mode);
      }
      if (auto raw = sample_depth(*frame.depth, px, SampleMode::kMax5x5)) {
        sample.raw_max5x5 = to_inverse_units(*raw, frame.depth->mode);
      }
    }
    if (sample.raw_point) {
      track.history.push_back({frame.index, *sample.raw_point});
      if (static_cast<int>(track.history.size()) > history_cap) {
        track.history.erase(track.history.begin());
      }
    }
    track.samples[frame.index] = sample;

    auto lm_it = window_.landmarks.find(fid);
    if (lm_it != window_.landmarks.end()) {
      lm_it->second.obs[cur_kf] = px;
    }
  }
}

void Estimator::activate_landmarks(const FrameInput& frame) {
  const TriangulateOptions tri_opts{opts_.min_parallax_deg};

  for (auto& [fid, track] : tracks_) {
    if (window_.landmarks.count(fid)) continue;

    // In-window observations of this pending track, oldest first.
    std::vector<std::pair<int, Vec2>> obs;  // (window index, pixel)
    for (const auto& [frame_id, sample] : track.samples) {
      const int idx = window_index(frame_id);
      if (idx >= 0) obs.emplace_back(idx, sample.px);
    }
    if (obs.size() < 2) continue;

    const int anchor_idx = obs.front().first;
    auto activate = [&](double inv_depth, bool via_mdi) {
      Landmark lm;
      lm.anchor_kf = anchor_idx;
      lm.inv_depth = inv_depth;
      for (const auto& [idx, px] : obs) lm.obs[idx] = px;
      window_.landmarks.emplace(fid, std::move(lm));
      activations_.push_back(
          ActivationRecord{fid, track.first_frame, frame.index, via_mdi});
    };

    // Triangulation from the maximal-parallax observation pair.
    double best_par = -1.0;
    std::pair<int, int> best{0, 0};
    for (std::size_t a = 0; a < obs.size(); ++a) {
      for (std::size_t b = a + 1; b < obs.size(); ++b) {
        const double par = parallax_deg(
            window_.keyframes[obs[a].first].pose,
            window_.keyframes[obs[b].first].pose, cam_, obs[a].second,
            obs[b].second);
        if (par > best_par) {
          best_par = par;
          best = {static_cast<int>(a), static_cast<int>(b)};
        }
      }
    }
    if (best_par >= opts_.min_parallax_deg) {
      const auto& oa = obs[best.first];
      const auto& ob = obs[best.second];
      const Pose& pose_a = window_.keyframes[oa.first].pose;
      const auto inv = triangulate(pose_a, window_.keyframes[ob.first].pose,
                                   cam_, oa.second, ob.second, tri_opts);
      if (inv) {
        // Express the point in the track's anchor frame.
        const Vec3 p_w = pose_a.act(cam_.unit_ray(oa.second) / *inv);
        const double z =
            window_.keyframes[anchor_idx].pose.inverse().act(p_w).z();
        if (z > Camera::kZMin) {
          activate(1.0 / z, /*via_mdi=*/false);
          continue;
        }
      }
    }

    // Depth-assisted initialization: accept an aligned prior hypothesis when
    // its hypothetical reprojection error into the current frame is small.
    if (!opts_.enable_mdi || !affine_.initialized) continue;
    const auto cur_sample = track.samples.find(frame.index);
    if (cur_sample == track.samples.end()) continue;
    const int anchor_frame_id = window_.keyframes[anchor_idx].frame_id;
    const auto anchor_sample = track.samples.find(anchor_frame_id);
    if (anchor_sample == track.samples.end() ||
        !anchor_sample->second.raw_max5x5) {
      continue;
    }
    const Pose& pose_i = window_.keyframes[anchor_idx].pose;
    const Pose& pose_j = window_.keyframes.back().pose;
    if ((pose_i.t - pose_j.t).norm() < opts_.mdi_min_baseline) continue;
    const auto cand = align(affine_, *anchor_sample->second.raw_max5x5);
    if (!cand || *cand <= 0.0) continue;
    const Vec3 p_w = pose_i.act(cam_.unit_ray(anchor_sample->second.px) /
                                *cand);
    const auto proj = cam_.project(pose_j.inverse().act(p_w));
    if (!proj) continue;
    if ((*proj - cur_sample->second.px).norm() < opts_.mdi_tau_px) {
      activate(*cand, /*via_mdi=*/true);
    }
  }
}

void Estimator::update_affine(const FrameInput& frame) {
  if (!frame.depth) return;
  const Pose& pose_cur = window_.keyframes.back().pose;

  std::vector<Correspondence> corrs;
  for (const auto& [fid, lm] : window_.landmarks) {
    const auto track_it = tracks_.find(fid);
    if (track_it == tracks_.end()) continue;
    const auto sample = track_it->second.samples.find(frame.index);
    if (sample == track_it->second.samples.end() ||
        !sample->second.raw_point) {
      continue;
    }
    const auto d_cur = current_inv_depth(lm, pose_cur);
    if (!d_cur) continue;
    corrs.push_back(Correspondence{fid, *d_cur, *sample->second.raw_point});
  }

  const auto fit = estimate_affine_ransac(
      corrs, opts_.ransac,
      splitmix64(opts_.seed) ^ static_cast<std::uint64_t>(frame.index));
  if (fit) update_affine_ema(affine_, fit->s, fit->t);
}

std::vector<OrdinalPairUse> Estimator::update_ordinal_pairs(
    const FrameInput& frame) {
  std::vector<OrdinalPairUse> used;
  std::vector<OrdinalFeature> features;
  for (const auto& [fid, lm] : window_.landmarks) {
    const auto track_it = tracks_.find(fid);
    if (track_it == tracks_.end()) continue;
    const auto sample = track_it->second.samples.find(frame.index);
    if (sample == track_it->second.samples.end() ||
        !sample->second.raw_point) {
      continue;
    }
    features.push_back(
        OrdinalFeature{fid, sample->second.px, *sample->second.raw_point});
  }

  const int current_frame = frame.index;
  PredictionHistory history = [&](FeatureId id) {
    const auto it = tracks_.find(id);
    if (it == tracks_.end()) return std::span<const PredictionSample>{};
    std::span<const PredictionSample> h(it->second.history);
    if (!h.empty() && h.back().frame == current_frame) {
      h = h.first(h.size() - 1);  // past frames only
    }
    return h;
  };

  const auto pairs = select_pairs(features, history, opts_.solver.ordinal);
  for (const auto& p : pairs) {
    const auto key = std::pair(p.id_i, p.id_j);
    auto [it, inserted] = pair_registry_.try_emplace(
        key, PairRecord{p.established_order, p.frames_verified, false});
    if (!inserted) {
      if (it->second.blacklisted) continue;
      if (it->second.order != p.established_order) {
        // Sign flip against the established order: independent motion or
        // jitter; reject the pair for good.
        it->second.blacklisted = true;
        continue;
      }
      ++it->second.verified;
    }
    used.push_back(OrdinalPairUse{p.id_i, p.id_j, it->second.order});
  }
  return used;
}

FactorGraph Estimator::build_graph(const std::vector<OrdinalPairUse>& pairs) {
  FactorGraph graph;

  for (const auto& [fid, lm] : window_.landmarks) {
    const auto anchor_obs = lm.obs.find(lm.anchor_kf);
    if (anchor_obs == lm.obs.end()) continue;
    for (const auto& [kf, px] : lm.obs) {
      if (kf == lm.anchor_kf) continue;  // zero-baseline degenerate block
      graph.reprojection.push_back(ReprojectionBlock{
          fid, lm.anchor_kf, kf, anchor_obs->second, px});
    }
  }

  for (std::size_t i = 1; i < window_.keyframes.size(); ++i) {
    const auto it = odom_meas_.find(window_.keyframes[i].frame_id);
    if (it == odom_meas_.end()) continue;
    graph.odometry.push_back(OdometryBlock{static_cast<int>(i - 1),
                                           static_cast<int>(i),
                                           it->second.first,
                                           it->second.second});
  }

  if (opts_.enable_depth_residuals && opts_.depth_weight > 0.0 &&
      affine_.initialized) {
    for (const auto& [fid, lm] : window_.landmarks) {
      const auto track_it = tracks_.find(fid);
      if (track_it == tracks_.end()) continue;
      const int anchor_frame = window_.keyframes[lm.anchor_kf].frame_id;
      const auto sample = track_it->second.samples.find(anchor_frame);
      if (sample == track_it->second.samples.end() ||
          !sample->second.raw_point) {
        continue;
      }

      double w_gate = 1.0;
      if (opts_.gating_enabled) {
        std::vector<double> aligned;
        aligned.reserve(track_it->second.history.size());
        for (const auto& h : track_it->second.history) {
          aligned.push_back(affine_.s * h.value + affine_.t);
        }
        const auto var = track_variance(aligned, opts_.gate.window);
        if (!var) continue;  // not yet gateable
        const auto w = gate_weight(*var, opts_.gate);
        if (!w) continue;  // hard-rejected, no block at all
        w_gate = *w;
      }

      const auto prior = align(affine_, *sample->second.raw_point);
      if (!prior || *prior <= 0.0) continue;
      graph.depth.push_back(
          DepthBlock{fid, *prior, opts_.depth_weight * w_gate});
    }
  }

  if (opts_.enable_ordinal && opts_.solver.ordinal.weight > 0.0) {
    for (const auto& p : pairs) {
      OrdinalBlock blk;
      blk.weight = opts_.solver.ordinal.weight;
      if (p.established_order > 0) {
        blk.feature_i = p.id_i;
        blk.feature_j = p.id_j;
      } else {
        blk.feature_i = p.id_j;
        blk.feature_j = p.id_i;
      }
      graph.ordinal.push_back(blk);
    }
  }
  return graph;
}

void Estimator::slide() {
  if (static_cast<int>(window_.keyframes.size()) <= opts_.window_size) return;

  const Keyframe& oldest = window_.keyframes.front();
  finalized_.push_back({oldest.timestamp, oldest.pose});
  const int evicted_frame = oldest.frame_id;

  marginalize_slide(window_, cam_, opts_.window_size);

  const int oldest_frame = window_.keyframes.front().frame_id;
  odom_meas_.erase(odom_meas_.begin(), odom_meas_.lower_bound(oldest_frame));
  for (auto it = tracks_.begin(); it != tracks_.end();) {
    auto& samples = it->second.samples;
    samples.erase(samples.begin(), samples.lower_bound(oldest_frame));
    if (samples.empty() && !window_.landmarks.count(it->first)) {
      it = tracks_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = pair_registry_.begin(); it != pair_registry_.end();) {
    if (!tracks_.count(it->first.first) || !tracks_.count(it->first.second)) {
      it = pair_registry_.erase(it);
    } else {
      ++it;
    }
  }
  (void)evicted_frame;
}

void Estimator::process(const FrameInput& frame) {
  Pose init;
  if (!window_.keyframes.empty()) {
    init = window_.keyframes.back().pose;
    if (frame.odom_from_prev) init = init.compose(*frame.odom_from_prev);
  }
  Keyframe kf;
  kf.frame_id = frame.index;
  kf.timestamp = frame.timestamp;
  kf.pose = init;
  kf.fixed = window_.keyframes.empty();
  window_.keyframes.push_back(kf);
  if (frame.odom_from_prev) {
    odom_meas_[frame.index] = {*frame.odom_from_prev, frame.odom_sqrt_info};
  }

  ingest_observations(frame);
  activate_landmarks(frame);
  if (opts_.enable_depth_residuals || opts_.enable_mdi) {
    update_affine(frame);
  }
  std::vector<OrdinalPairUse> pairs;
  if (opts_.enable_ordinal) pairs = update_ordinal_pairs(frame);

  const FactorGraph graph = build_graph(pairs);
  const SolveReport report =
      solve_window(window_, graph, cam_, opts_.solver);
  if (report.status == SolveStatus::kSingularNormalEquations) {
    solver_failed_ = true;
  }

  FrameDiagnostics diag;
  diag.frame_id = frame.index;
  diag.timestamp = frame.timestamp;
  diag.solve_ms = report.wall_ms;
  diag.iterations = report.iterations;
  diag.initial_cost = report.initial_cost;
  diag.final_cost = report.final_cost;
  diag.active_landmarks = static_cast<int>(window_.landmarks.size());
  diag.reprojection_blocks = static_cast<int>(graph.reprojection.size());
  diag.depth_blocks = static_cast<int>(graph.depth.size());
  diag.ordinal_blocks = static_cast<int>(graph.ordinal.size());
  diag.solver_failed =
      report.status == SolveStatus::kSingularNormalEquations;
  diag.affine_s = affine_.s;
  diag.affine_t = affine_.t;
  diag.affine_initialized = affine_.initialized;
  diag.ordinal_pairs = pairs;
  if (opts_.record_landmark_states) {
    for (const auto& [fid, lm] : window_.landmarks) {
      diag.landmark_states.push_back(LandmarkSnapshot{
          fid, window_.keyframes[lm.anchor_kf].frame_id, lm.inv_depth});
    }
  }
  diags_.push_back(std::move(diag));

  slide();
}

std::vector<StampedPose> Estimator::trajectory() const {
  std::vector<StampedPose> out = finalized_;
  for (const auto& kf : window_.keyframes) {
    out.push_back({kf.timestamp, kf.pose});
  }
  return out;
}

}  // namespace dvio
