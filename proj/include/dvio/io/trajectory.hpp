#pragma once

#include <string>
#include <vector>

#include "dvio/geometry/pose.hpp"

namespace dvio {

struct StampedPose {
  double timestamp = 0.0;
  Pose pose;
};

/// TUM format: "timestamp tx ty tz qx qy qz qw", one pose per line,
/// '#' comments allowed.
void save_tum_trajectory(const std::string& path,
                         const std::vector<StampedPose>& traj);
std::vector<StampedPose> load_tum_trajectory(const std::string& path);

}  // namespace dvio
