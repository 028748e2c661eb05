#include "dvio/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace dvio {

std::vector<std::pair<int, int>> associate(
    const std::vector<StampedPose>& est, const std::vector<StampedPose>& gt,
    double max_gap_s) {
  std::vector<std::pair<int, int>> matches;
  if (gt.empty()) return matches;
  int j = 0;
  std::vector<bool> taken(gt.size(), false);
  for (int i = 0; i < static_cast<int>(est.size()); ++i) {
    const double t = est[i].timestamp;
    while (j + 1 < static_cast<int>(gt.size()) &&
           std::abs(gt[j + 1].timestamp - t) <= std::abs(gt[j].timestamp - t)) {
      ++j;
    }
    if (std::abs(gt[j].timestamp - t) <= max_gap_s && !taken[j]) {
      taken[j] = true;
      matches.emplace_back(i, j);
    }
  }
  return matches;
}

std::optional<double> ate_rmse(const std::vector<StampedPose>& est,
                               const std::vector<StampedPose>& gt,
                               const AteOptions& opts) {
  const auto matches = associate(est, gt, opts.max_gap_s);
  if (matches.size() < 3) return std::nullopt;

  std::vector<Vec3> p_est, p_gt;
  p_est.reserve(matches.size());
  p_gt.reserve(matches.size());
  for (const auto& [i, j] : matches) {
    p_est.push_back(est[i].pose.t);
    p_gt.push_back(gt[j].pose.t);
  }
  const auto sim = umeyama_sim3(p_est, p_gt);
  if (!sim) return std::nullopt;

  double ss = 0.0;
  for (std::size_t k = 0; k < p_est.size(); ++k) {
    ss += (sim->act(p_est[k]) - p_gt[k]).squaredNorm();
  }
  return std::sqrt(ss / static_cast<double>(p_est.size()));
}

bool divergence_check(const std::vector<StampedPose>& est,
                      const std::vector<StampedPose>& gt, bool solver_failed,
                      const DivergenceOptions& opts) {
  if (solver_failed) return true;
  if (gt.empty()) return false;
  if (static_cast<double>(est.size()) <
      opts.min_length_fraction * static_cast<double>(gt.size())) {
    return true;
  }
  const auto ate = ate_rmse(est, gt);
  if (!ate) return true;
  return *ate > opts.ate_threshold_m;
}

std::optional<double> improvement_pct(double baseline_avg, double method_avg) {
  if (!(baseline_avg > 0.0)) return std::nullopt;
  return 100.0 * (baseline_avg - method_avg) / baseline_avg;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace dvio
