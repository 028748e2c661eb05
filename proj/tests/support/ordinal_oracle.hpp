#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "dvio/ordinal/ordinal.hpp"

namespace dvio::testing {

// Independent reimplementation of the pair-selection contract: plain O(N^2)
// double loop with the same criteria and budget policy. The production path
// must match it exactly (spatial binning is an optimization, not an
// approximation).
inline std::vector<OrdinalPair> brute_force_select(
    const std::vector<OrdinalFeature>& features,
    const PredictionHistory& history, const OrdinalConfig& cfg) {
  struct Cand {
    double dist;
    int i, j;
    int order;
    int common;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < static_cast<int>(features.size()); ++i) {
    for (int j = i + 1; j < static_cast<int>(features.size()); ++j) {
      const auto* a = &features[i];
      const auto* b = &features[j];
      int ia = i, ib = j;
      if (b->id < a->id) {
        std::swap(a, b);
        std::swap(ia, ib);
      }
      if (a->id == b->id) continue;
      const double dist = (a->px - b->px).norm();
      if (dist >= cfg.tau_dist) continue;
      if (!(std::abs(a->prediction - b->prediction) >
            cfg.eta * std::max(a->prediction, b->prediction))) {
        continue;
      }
      const double diff = a->prediction - b->prediction;
      const int sign = diff > 0 ? 1 : (diff < 0 ? -1 : 0);
      if (sign == 0) continue;
      const auto ha = history(a->id);
      const auto hb = history(b->id);
      int common = 0;
      bool consistent = true;
      for (const auto& sa : ha) {
        for (const auto& sb : hb) {
          if (sa.frame != sb.frame) continue;
          ++common;
          const double d = sa.value - sb.value;
          const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
          if (s != sign) consistent = false;
        }
      }
      if (!consistent || common < cfg.min_common_frames) continue;
      cands.push_back({dist, ia, ib, sign, common});
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return std::pair(features[a.i].id, features[a.j].id) <
           std::pair(features[b.i].id, features[b.j].id);
  });
  std::map<FeatureId, int> budget;
  std::vector<OrdinalPair> out;
  for (const auto& c : cands) {
    const FeatureId ai = features[c.i].id;
    const FeatureId aj = features[c.j].id;
    if (budget[ai] >= cfg.max_pairs_per_feature ||
        budget[aj] >= cfg.max_pairs_per_feature) {
      continue;
    }
    ++budget[ai];
    ++budget[aj];
    out.push_back({ai, aj, c.order, c.common});
  }
  return out;
}

inline bool same_pairs(const std::vector<OrdinalPair>& a,
                       const std::vector<OrdinalPair>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id_i != b[i].id_i || a[i].id_j != b[i].id_j ||
        a[i].established_order != b[i].established_order ||
        a[i].frames_verified != b[i].frames_verified) {
      return false;
    }
  }
  return true;
}

}  // namespace dvio::testing
