#include "dvio/ordinal/ordinal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace dvio {

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

// True when every common historical frame carries the same prediction sign
// as the current one; counts the common frames seen.
bool history_consistent(std::span<const PredictionSample> hi,
                        std::span<const PredictionSample> hj, int current_sign,
                        int min_common, int& common) {
  common = 0;
  std::size_t a = 0, b = 0;
  while (a < hi.size() && b < hj.size()) {
    if (hi[a].frame < hj[b].frame) {
      ++a;
    } else if (hj[b].frame < hi[a].frame) {
      ++b;
    } else {
      if (sign_of(hi[a].value - hj[b].value) != current_sign) return false;
      ++common;
      ++a;
      ++b;
    }
  }
  return common >= min_common;
}

struct Candidate {
  double dist = 0.0;
  int idx_i = 0;  // positions in the feature span, id_i < id_j
  int idx_j = 0;
  int order = 0;
  int verified = 0;
};

}  // namespace

std::vector<OrdinalPair> select_pairs(std::span<const OrdinalFeature> features,
                                      const PredictionHistory& history,
                                      const OrdinalConfig& cfg) {
  const int n = static_cast<int>(features.size());
  std::vector<Candidate> candidates;
  if (n >= 2) {
    // Grid of cell size tau_dist: any pair closer than tau_dist lands in
    // adjacent cells, so scanning the 3x3 neighborhood enumerates a superset.
    const double cell = cfg.tau_dist;
    auto key = [&](int gx, int gy) {
      return (static_cast<std::int64_t>(gx) << 32) ^
             static_cast<std::uint32_t>(gy);
    };
    std::unordered_map<std::int64_t, std::vector<int>> grid;
    std::vector<std::pair<int, int>> cells(n);
    for (int i = 0; i < n; ++i) {
      const int gx = static_cast<int>(std::floor(features[i].px.x() / cell));
      const int gy = static_cast<int>(std::floor(features[i].px.y() / cell));
      cells[i] = {gx, gy};
      grid[key(gx, gy)].push_back(i);
    }

    for (int i = 0; i < n; ++i) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          auto it = grid.find(key(cells[i].first + dx, cells[i].second + dy));
          if (it == grid.end()) continue;
          for (int j : it->second) {
            if (j <= i) continue;
            const auto& fi = features[i];
            const auto& fj = features[j];
            if (fi.id == fj.id) continue;
            const double dist = (fi.px - fj.px).norm();
            if (dist >= cfg.tau_dist) continue;
            const double margin =
                cfg.eta * std::max(fi.prediction, fj.prediction);
            if (!(std::abs(fi.prediction - fj.prediction) > margin)) continue;

            // Canonical id order; the sign travels with it.
            const bool swap = fj.id < fi.id;
            const auto& a = swap ? fj : fi;
            const auto& b = swap ? fi : fj;
            const int current_sign = sign_of(a.prediction - b.prediction);
            if (current_sign == 0) continue;
            int common = 0;
            if (!history_consistent(history(a.id), history(b.id),
                                    current_sign, cfg.min_common_frames,
                                    common)) {
              continue;
            }
            candidates.push_back({dist, swap ? j : i, swap ? i : j,
                                  current_sign, common});
          }
        }
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& a, const Candidate& b) {
              if (a.dist != b.dist) return a.dist < b.dist;
              const auto ida = std::pair(features[a.idx_i].id,
                                         features[a.idx_j].id);
              const auto idb = std::pair(features[b.idx_i].id,
                                         features[b.idx_j].id);
              return ida < idb;
            });

  std::unordered_map<FeatureId, int> budget;
  std::vector<OrdinalPair> out;
  for (const auto& c : candidates) {
    const FeatureId ai = features[c.idx_i].id;
    const FeatureId aj = features[c.idx_j].id;
    if (budget[ai] >= cfg.max_pairs_per_feature ||
        budget[aj] >= cfg.max_pairs_per_feature) {
      continue;
    }
    ++budget[ai];
    ++budget[aj];
    out.push_back(OrdinalPair{ai, aj, c.order, c.verified});
  }
  return out;
}

double ordinal_residual(double d_i, double d_j, const OrdinalConfig& cfg) {
  return std::max(0.0, (d_j + cfg.epsilon_coeff * d_i) - d_i);
}

void ordinal_jacobian(double d_i, double d_j, const OrdinalConfig& cfg,
                      double& j_di, double& j_dj) {
  if ((d_j + cfg.epsilon_coeff * d_i) - d_i > 0.0) {
    j_di = cfg.epsilon_coeff - 1.0;
    j_dj = 1.0;
  } else {
    j_di = 0.0;
    j_dj = 0.0;
  }
}

}  // namespace dvio
