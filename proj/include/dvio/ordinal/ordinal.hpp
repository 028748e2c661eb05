#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dvio/core/types.hpp"

namespace dvio {

/// Pairwise ordering constraint between two features, oriented so the network
/// asserts inverse_depth(id_i) > inverse_depth(id_j) (i is closer).
struct OrdinalPair {
  FeatureId id_i = -1;
  FeatureId id_j = -1;
  int established_order = 0;  // +1 iff prediction(id_i) > prediction(id_j)
  int frames_verified = 0;    // common historical frames with consistent sign
};

struct OrdinalConfig {
  double tau_dist = 50.0;      // locality radius, pixels
  double eta = 0.05;           // margin fraction of max(d_i, d_j)
  double epsilon_coeff = 0.02; // adaptive hinge margin coefficient
  double weight = 10.0;        // residual weight w_O
  int min_common_frames = 2;   // history needed before a pair is trusted
  int max_pairs_per_feature = 3;
};

/// A feature observed in the current frame with its sampled prediction.
struct OrdinalFeature {
  FeatureId id = -1;
  Vec2 px = Vec2::Zero();
  double prediction = 0.0;  // network inverse-depth value for this frame
};

/// One historical sample of a feature's prediction.
struct PredictionSample {
  int frame = -1;
  double value = 0.0;
};

/// Access to a feature's past predictions (current frame excluded),
/// in increasing frame order.
using PredictionHistory =
    std::function<std::span<const PredictionSample>(FeatureId)>;

/// Spatio-temporal pair selection. A pair is emitted iff
///   (i)  the pixel distance is below tau_dist (spatial binning keeps the
///        candidate generation out of O(N^2)),
///   (ii) |d_i - d_j| > eta * max(d_i, d_j) in the current frame, and
///   (iii) sign(d_i - d_j) matches the current sign in every common
///         historical frame, with at least min_common_frames of them.
/// Each unordered pair appears at most once, ids in canonical (ascending)
/// order with established_order carrying the direction. Accepted pairs are
/// capped at max_pairs_per_feature per feature, nearest first (ties broken
/// by feature ids).
std::vector<OrdinalPair> select_pairs(std::span<const OrdinalFeature> features,
                                      const PredictionHistory& history,
                                      const OrdinalConfig& cfg);

/// Soft hinge penalizing a state ordering that contradicts the established
/// one: max(0, (d_j + epsilon_coeff * d_i) - d_i). Inputs must already be
/// oriented via established_order.
double ordinal_residual(double d_i, double d_j, const OrdinalConfig& cfg);

/// Hinge subgradients (d/d_i, d/d_j); (0, 0) on the inactive side including
/// exactly at the kink.
void ordinal_jacobian(double d_i, double d_j, const OrdinalConfig& cfg,
                      double& j_di, double& j_dj);

}  // namespace dvio
