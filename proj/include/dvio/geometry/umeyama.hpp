#pragma once

#include <optional>
#include <vector>

#include "dvio/geometry/pose.hpp"

namespace dvio {

/// Closed-form Sim(3) minimizing sum_i ||s*R*src[i] + t - dst[i]||^2.
/// Empty on degenerate input: fewer than 3 points, mismatched sizes, or
/// (near-)collinear source points, where the rotation is unobservable.
std::optional<Sim3> umeyama_sim3(const std::vector<Vec3>& src,
                                 const std::vector<Vec3>& dst);

}  // namespace dvio
