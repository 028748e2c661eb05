#include "dvio/graph/window.hpp"

namespace dvio {

void marginalize_slide(WindowState& state, const Camera& cam,
                       int window_size) {
  if (static_cast<int>(state.keyframes.size()) <= window_size) return;

  const Keyframe& oldest = state.keyframes.front();
  for (auto it = state.landmarks.begin(); it != state.landmarks.end();) {
    Landmark& lm = it->second;
    if (lm.anchor_kf == 0) {
      // Next keyframe that still observes the feature becomes the anchor.
      int new_anchor = -1;
      for (const auto& [kf, px] : lm.obs) {
        if (kf > 0) {
          new_anchor = kf;
          break;
        }
      }
      bool keep = false;
      if (new_anchor >= 0 && lm.inv_depth > 0.0) {
        const auto anchor_it = lm.obs.find(0);
        if (anchor_it != lm.obs.end()) {
          const Vec3 p_w = oldest.pose.act(cam.unit_ray(anchor_it->second) /
                                           lm.inv_depth);
          const double z =
              state.keyframes[new_anchor].pose.inverse().act(p_w).z();
          if (z > Camera::kZMin) {
            lm.anchor_kf = new_anchor;
            lm.inv_depth = 1.0 / z;
            keep = true;
          }
        }
      }
      if (!keep) {
        it = state.landmarks.erase(it);
        continue;
      }
    }
    lm.obs.erase(0);
    if (lm.obs.empty()) {
      it = state.landmarks.erase(it);
      continue;
    }
    ++it;
  }

  state.keyframes.erase(state.keyframes.begin());
  for (auto& [id, lm] : state.landmarks) {
    lm.anchor_kf -= 1;
    std::map<int, Vec2> shifted;
    for (const auto& [kf, px] : lm.obs) shifted.emplace(kf - 1, px);
    lm.obs = std::move(shifted);
  }
  for (std::size_t i = 0; i < state.keyframes.size(); ++i) {
    state.keyframes[i].fixed = (i == 0);
  }
}

}  // namespace dvio
