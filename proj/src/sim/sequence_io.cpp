#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "dvio/core/errors.hpp"
#include "dvio/io/trajectory.hpp"
#include "dvio/sim/sim_json.hpp"
#include "dvio/sim/simulator.hpp"

namespace dvio {

namespace fs = std::filesystem;

namespace {

std::string frame_name(int index, const char* ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06d%s", index, ext);
  return buf;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("short write: " + path);
}

}  // namespace

void save_sequence(const std::string& dir, const SyntheticSequence& seq) {
  fs::create_directories(fs::path(dir) / "frames");
  if (seq.scene.images) fs::create_directories(fs::path(dir) / "images");

  nlohmann::json meta;
  meta["format"] = "dvio-sequence-v1";
  meta["camera"] = seq.camera;
  meta["scene"] = seq.scene;
  meta["noise"] = seq.noise;
  meta["n_frames"] = seq.frames.size();
  {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : seq.points) pts.push_back({p.x(), p.y(), p.z()});
    meta["points"] = std::move(pts);

    std::map<FeatureId, int> feature_points;
    nlohmann::json affine = nlohmann::json::array();
    for (const auto& f : seq.frames) {
      for (const auto& obs : f.observations) {
        feature_points.emplace(obs.feature_id, obs.point_index);
      }
      affine.push_back({f.s_realized, f.t_realized});
    }
    nlohmann::json fp = nlohmann::json::array();
    for (const auto& [fid, pidx] : feature_points) fp.push_back({fid, pidx});
    meta["feature_points"] = std::move(fp);
    meta["affine_realized"] = std::move(affine);
  }
  write_text((fs::path(dir) / "meta.json").string(), meta.dump(2) + "\n");

  {
    std::vector<StampedPose> gt;
    gt.reserve(seq.frames.size());
    for (const auto& f : seq.frames) {
      gt.push_back({f.timestamp, f.true_pose});
    }
    save_tum_trajectory((fs::path(dir) / "gt.csv").string(), gt);
  }

  {
    std::ostringstream odom;
    odom << "frame,qx,qy,qz,qw,tx,ty,tz\n";
    char line[256];
    for (const auto& f : seq.frames) {
      if (f.index == 0) continue;
      const Pose& m = f.odom_measured;
      std::snprintf(line, sizeof(line),
                    "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    f.index, m.q.x(), m.q.y(), m.q.z(), m.q.w(), m.t.x(),
                    m.t.y(), m.t.z());
      odom << line;
    }
    write_text((fs::path(dir) / "odom.csv").string(), odom.str());
  }

  {
    std::ostringstream tracks;
    tracks << "frame,feature_id,u,v\n";
    char line[128];
    for (const auto& f : seq.frames) {
      for (const auto& obs : f.observations) {
        std::snprintf(line, sizeof(line), "%d,%d,%.8f,%.8f\n", f.index,
                      obs.feature_id, obs.px.x(), obs.px.y());
        tracks << line;
      }
    }
    write_text((fs::path(dir) / "tracks.csv").string(), tracks.str());
  }

  for (const auto& f : seq.frames) {
    save_dpm((fs::path(dir) / "frames" / frame_name(f.index, ".dpm")).string(),
             f.depth);
    if (f.image) {
      save_ppm(
          (fs::path(dir) / "images" / frame_name(f.index, ".ppm")).string(),
          *f.image);
    }
  }
}

SyntheticSequence load_sequence(const std::string& dir) {
  std::ifstream meta_in(fs::path(dir) / "meta.json");
  if (!meta_in) throw IoError("missing meta.json in " + dir);
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad meta.json in " + dir + ": " + e.what());
  }

  SyntheticSequence seq;
  try {
    seq.camera = meta.at("camera").get<Camera>();
    seq.scene = meta.at("scene").get<SceneConfig>();
    seq.noise = meta.at("noise").get<MdeNoiseModel>();
    for (const auto& p : meta.at("points")) {
      seq.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(),
                              p.at(2).get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad meta.json in " + dir + ": " + e.what());
  }
  std::map<FeatureId, int> feature_points;
  for (const auto& fp : meta.at("feature_points")) {
    feature_points[fp.at(0).get<FeatureId>()] = fp.at(1).get<int>();
  }
  const auto n_frames = meta.at("n_frames").get<std::size_t>();

  const auto gt = load_tum_trajectory((fs::path(dir) / "gt.csv").string());
  if (gt.size() != n_frames) throw IoError("gt.csv frame count mismatch");

  seq.frames.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    FrameBundle& f = seq.frames[k];
    f.index = static_cast<int>(k);
    f.timestamp = gt[k].timestamp;
    f.true_pose = gt[k].pose;
    f.depth = load_dpm(
        (fs::path(dir) / "frames" / frame_name(f.index, ".dpm")).string());
    const auto ppm = fs::path(dir) / "images" / frame_name(f.index, ".ppm");
    if (fs::exists(ppm)) f.image = load_ppm(ppm.string());
  }

  {
    std::ifstream in(fs::path(dir) / "odom.csv");
    if (!in) throw IoError("missing odom.csv in " + dir);
    std::string line;
    std::getline(in, line);  // header
    const double sr = seq.scene.odom_sigma_r_deg * M_PI / 180.0;
    const double st_eff = std::max(seq.scene.odom_sigma_t, 1e-4);
    const double sr_eff = std::max(sr, 1e-5);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      int frame = 0;
      double qx, qy, qz, qw, tx, ty, tz;
      if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &frame,
                      &qx, &qy, &qz, &qw, &tx, &ty, &tz) != 8) {
        throw IoError("bad odom.csv line: " + line);
      }
      if (frame <= 0 || frame >= static_cast<int>(n_frames)) {
        throw IoError("odom.csv frame index out of range");
      }
      FrameBundle& f = seq.frames[frame];
      f.odom_measured.q = Quat(qw, qx, qy, qz).normalized();
      f.odom_measured.t = Vec3(tx, ty, tz);
      f.odom_sqrt_info.head<3>().setConstant(1.0 / st_eff);
      f.odom_sqrt_info.tail<3>().setConstant(1.0 / sr_eff);
    }
  }

  {
    std::ifstream in(fs::path(dir) / "tracks.csv");
    if (!in) throw IoError("missing tracks.csv in " + dir);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      int frame = 0, fid = 0;
      double u, v;
      if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &frame, &fid, &u, &v) !=
          4) {
        throw IoError("bad tracks.csv line: " + line);
      }
      if (frame < 0 || frame >= static_cast<int>(n_frames)) {
        throw IoError("tracks.csv frame index out of range");
      }
      Observation obs;
      obs.feature_id = fid;
      obs.px = Vec2(u, v);
      auto it = feature_points.find(fid);
      obs.point_index = it == feature_points.end() ? -1 : it->second;
      if (obs.point_index >= 0 &&
          obs.point_index < static_cast<int>(seq.points.size())) {
        obs.true_depth = seq.frames[frame]
                             .true_pose.inverse()
                             .act(seq.points[obs.point_index])
                             .z();
      }
      seq.frames[frame].observations.push_back(obs);
    }
  }

  if (meta.contains("affine_realized")) {
    const auto& aff = meta["affine_realized"];
    for (std::size_t k = 0; k < n_frames && k < aff.size(); ++k) {
      seq.frames[k].s_realized = aff[k].at(0).get<double>();
      seq.frames[k].t_realized = aff[k].at(1).get<double>();
    }
  }
  return seq;
}

}  // namespace dvio
