#include "dvio/depth/affine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dvio/core/rng.hpp"

namespace dvio {

namespace {

void set_status(AffineFitStatus* status, AffineFitStatus value) {
  if (status) *status = value;
}

// Closed-form 1-D least squares d = s * mde + t over the given subset.
// Returns false when the mde values are (numerically) constant.
bool least_squares_line(const std::vector<Correspondence>& corrs,
                        const std::vector<int>& subset, double& s, double& t) {
  double mx = 0.0, my = 0.0;
  for (int i : subset) {
    mx += corrs[i].mde_value;
    my += corrs[i].vio_inv_depth;
  }
  const double n = static_cast<double>(subset.size());
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i : subset) {
    const double dx = corrs[i].mde_value - mx;
    sxx += dx * dx;
    sxy += dx * (corrs[i].vio_inv_depth - my);
  }
  if (sxx <= 1e-18) return false;
  s = sxy / sxx;
  t = my - s * mx;
  return true;
}

double inlier_threshold(const std::vector<Correspondence>& corrs,
                        const RansacConfig& cfg) {
  if (cfg.inlier_tol > 0.0) return cfg.inlier_tol;
  std::vector<double> d;
  d.reserve(corrs.size());
  for (const auto& c : corrs) d.push_back(std::abs(c.vio_inv_depth));
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  return cfg.rel_tol * d[mid];
}

std::vector<int> inliers_of(const std::vector<Correspondence>& corrs, double s,
                            double t, double tol) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(corrs.size()); ++i) {
    if (std::abs(corrs[i].vio_inv_depth - (s * corrs[i].mde_value + t)) <
        tol) {
      idx.push_back(i);
    }
  }
  return idx;
}

}  // namespace

std::optional<AffineFit> estimate_affine_ransac(
    const std::vector<Correspondence>& corrs, const RansacConfig& cfg,
    std::uint64_t seed, AffineFitStatus* status) {
  const int n = static_cast<int>(corrs.size());
  if (n < 2) {
    set_status(status, AffineFitStatus::kTooFewCorrespondences);
    return std::nullopt;
  }

  const double tol = inlier_threshold(corrs, cfg);
  auto rng = make_engine(seed, /*stream=*/0x0affe);
  std::uniform_int_distribution<int> pick(0, n - 1);

  std::vector<int> best_inliers;
  for (int it = 0; it < cfg.iterations; ++it) {
    const int a = pick(rng);
    int b = pick(rng);
    if (b == a) b = (b + 1) % n;
    const double dx = corrs[b].mde_value - corrs[a].mde_value;
    if (std::abs(dx) < 1e-18) continue;
    const double s = (corrs[b].vio_inv_depth - corrs[a].vio_inv_depth) / dx;
    if (s <= 0.0) continue;  // physically inconsistent model
    const double t = corrs[a].vio_inv_depth - s * corrs[a].mde_value;
    auto inl = inliers_of(corrs, s, t, tol);
    if (inl.size() > best_inliers.size()) best_inliers = std::move(inl);
  }

  if (best_inliers.size() < 2) {
    set_status(status, AffineFitStatus::kNoValidModel);
    return std::nullopt;
  }

  AffineFit fit;
  if (!least_squares_line(corrs, best_inliers, fit.s, fit.t) || fit.s <= 0.0) {
    set_status(status, AffineFitStatus::kNoValidModel);
    return std::nullopt;
  }
  // One re-gate + refit pass tightens the set when borderline outliers crept
  // into the consensus of the sampled model.
  auto regated = inliers_of(corrs, fit.s, fit.t, tol);
  if (regated.size() >= 2) {
    double s2 = fit.s, t2 = fit.t;
    if (least_squares_line(corrs, regated, s2, t2) && s2 > 0.0) {
      fit.s = s2;
      fit.t = t2;
      best_inliers = std::move(regated);
    }
  }
  fit.inliers = std::move(best_inliers);
  set_status(status, AffineFitStatus::kOk);
  return fit;
}

bool update_affine_ema(AffineState& state, double s_meas, double t_meas) {
  if (!(s_meas > 0.0)) return false;
  if (!state.initialized) {
    state.s = s_meas;
    state.t = t_meas;
    state.initialized = true;
    return true;
  }
  state.s = (1.0 - state.alpha) * state.s + state.alpha * s_meas;
  state.t = (1.0 - state.alpha) * state.t + state.alpha * t_meas;
  return true;
}

std::optional<double> align(const AffineState& state, double mde_value) {
  if (!state.initialized) return std::nullopt;
  return state.s * mde_value + state.t;
}

}  // namespace dvio
