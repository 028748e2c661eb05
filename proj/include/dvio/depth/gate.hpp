#pragma once

#include <optional>
#include <span>

namespace dvio {

struct GateConfig {
  double gamma = 1e4;          // decay rate of the confidence kernel
  double sigma2_thresh = 0.01; // hard-rejection variance threshold
  int window = 5;              // track-history length for the variance
};

/// Unbiased sample variance of the most recent `window` entries.
/// Empty with fewer than 2 usable entries (not yet gateable).
std::optional<double> track_variance(std::span<const double> history,
                                     int window);

/// Confidence weight exp(-gamma * sigma2), or empty when sigma2 exceeds the
/// hard threshold and the prior must be excluded from the graph entirely.
std::optional<double> gate_weight(double sigma2, const GateConfig& cfg);

}  // namespace dvio
