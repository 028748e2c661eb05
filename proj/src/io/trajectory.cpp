#include "dvio/io/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dvio/core/errors.hpp"

namespace dvio {

void save_tum_trajectory(const std::string& path,
                         const std::vector<StampedPose>& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  char line[256];
  for (const auto& sp : traj) {
    std::snprintf(line, sizeof(line),
                  "%.6f %.9f %.9f %.9f %.9f %.9f %.9f %.9f\n", sp.timestamp,
                  sp.pose.t.x(), sp.pose.t.y(), sp.pose.t.z(), sp.pose.q.x(),
                  sp.pose.q.y(), sp.pose.q.z(), sp.pose.q.w());
    out << line;
  }
  if (!out) throw IoError("short write: " + path);
}

std::vector<StampedPose> load_tum_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<StampedPose> traj;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    StampedPose sp;
    double qx, qy, qz, qw;
    if (std::sscanf(line.c_str(), "%lf %lf %lf %lf %lf %lf %lf %lf",
                    &sp.timestamp, &sp.pose.t.x(), &sp.pose.t.y(),
                    &sp.pose.t.z(), &qx, &qy, &qz, &qw) != 8) {
      throw IoError("bad trajectory line in " + path + ": " + line);
    }
    sp.pose.q = Quat(qw, qx, qy, qz).normalized();
    traj.push_back(sp);
  }
  return traj;
}

}  // namespace dvio
