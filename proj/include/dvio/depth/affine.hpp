#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dvio/core/types.hpp"

namespace dvio {

/// One (triangulated VIO inverse depth, sampled network prediction) pair.
struct Correspondence {
  FeatureId feature_id = -1;
  double vio_inv_depth = 0.0;  // 1/m, > 0
  double mde_value = 0.0;      // network inverse-depth units
};

/// Smoothed global scale/shift mapping network predictions to metric inverse
/// depth: aligned = s * prediction + t.
struct AffineState {
  double s = 1.0;
  double t = 0.0;
  bool initialized = false;
  double alpha = 0.1;  // EMA smoothing factor in (0, 1]
};

struct RansacConfig {
  int iterations = 100;
  // Absolute inlier tolerance on |d_i - (s*mde_i + t)|. Non-positive selects
  // the relative rule rel_tol * median(d_i).
  double inlier_tol = 0.0;
  double rel_tol = 0.05;
};

enum class AffineFitStatus {
  kOk,
  kTooFewCorrespondences,
  // Every sampled model had s <= 0, or no model gathered >= 2 inliers.
  // The caller skips depth factors for this frame.
  kNoValidModel,
};

struct AffineFit {
  double s = 0.0;
  double t = 0.0;
  std::vector<int> inliers;  // indices into the input correspondence list
};

/// Two-stage estimation: RANSAC over 2-point models (discarding s <= 0),
/// then closed-form least squares on the winning inlier set. The refined
/// slope is guaranteed positive; otherwise the fit is rejected.
std::optional<AffineFit> estimate_affine_ransac(
    const std::vector<Correspondence>& corrs, const RansacConfig& cfg,
    std::uint64_t seed, AffineFitStatus* status = nullptr);

/// EMA blend of a new measurement into the state. The first measurement is
/// adopted outright. Requires s_meas > 0; returns false (state untouched)
/// otherwise.
bool update_affine_ema(AffineState& state, double s_meas, double t_meas);

/// Aligned inverse depth s * mde + t. Empty while the state is uninitialized.
std::optional<double> align(const AffineState& state, double mde_value);

}  // namespace dvio
