#include "dvio/depth/gate.hpp"

#include <cmath>
#include <cstddef>

namespace dvio {

std::optional<double> track_variance(std::span<const double> history,
                                     int window) {
  if (window < 2) return std::nullopt;
  const std::size_t take =
      std::min(history.size(), static_cast<std::size_t>(window));
  if (take < 2) return std::nullopt;
  const auto recent = history.subspan(history.size() - take);

  double mean = 0.0;
  for (double v : recent) mean += v;
  mean /= static_cast<double>(take);
  double ss = 0.0;
  for (double v : recent) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(take - 1);
}

std::optional<double> gate_weight(double sigma2, const GateConfig& cfg) {
  if (sigma2 > cfg.sigma2_thresh) return std::nullopt;
  return std::exp(-cfg.gamma * sigma2);
}

}  // namespace dvio
