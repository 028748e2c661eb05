#pragma once

#include <optional>
#include <vector>

#include "dvio/geometry/umeyama.hpp"
#include "dvio/io/trajectory.hpp"

namespace dvio {

struct AteOptions {
  double max_gap_s = 0.02;  // nearest-neighbor association window
};

/// Nearest-neighbor timestamp association between the two trajectories.
/// Returns (est index, gt index) pairs; each gt pose is matched at most once.
std::vector<std::pair<int, int>> associate(
    const std::vector<StampedPose>& est, const std::vector<StampedPose>& gt,
    double max_gap_s);

/// ATE RMSE in meters after Sim(3) alignment of the estimate onto the ground
/// truth. Empty when fewer than 3 associated pairs exist or the alignment is
/// degenerate.
std::optional<double> ate_rmse(const std::vector<StampedPose>& est,
                               const std::vector<StampedPose>& gt,
                               const AteOptions& opts = {});

struct DivergenceOptions {
  double ate_threshold_m = 10.0;
  double min_length_fraction = 0.5;
};

/// A run diverged if the ATE exceeds the threshold, the estimator reported a
/// solver failure, or the estimate covers less than half the ground truth.
bool divergence_check(const std::vector<StampedPose>& est,
                      const std::vector<StampedPose>& gt, bool solver_failed,
                      const DivergenceOptions& opts = {});

/// 100 * (baseline - method) / baseline. Empty when baseline <= 0.
std::optional<double> improvement_pct(double baseline_avg, double method_avg);

/// Median of a sample (mean of the middle two for even sizes).
double median(std::vector<double> values);

}  // namespace dvio
