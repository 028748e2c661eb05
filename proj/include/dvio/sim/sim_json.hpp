#pragma once

#include <json.hpp>

#include "dvio/sim/simulator.hpp"

namespace dvio {

// ADL (de)serializers so simulator configs embed naturally in meta.json and
// experiment config files.

NLOHMANN_JSON_SERIALIZE_ENUM(TrajectoryKind,
                             {{TrajectoryKind::kCircle, "circle"},
                              {TrajectoryKind::kLawnmower, "lawnmower"},
                              {TrajectoryKind::kCorridor, "corridor"}})

NLOHMANN_JSON_SERIALIZE_ENUM(DepthMode,
                             {{DepthMode::kAffineInverse, "affine_inverse"},
                              {DepthMode::kMetric, "metric"}})

inline void to_json(nlohmann::json& j, const Camera& c) {
  j = {{"fx", c.fx},       {"fy", c.fy},     {"cx", c.cx},
       {"cy", c.cy},       {"width", c.width}, {"height", c.height}};
}

inline void from_json(const nlohmann::json& j, Camera& c) {
  j.at("fx").get_to(c.fx);
  j.at("fy").get_to(c.fy);
  j.at("cx").get_to(c.cx);
  j.at("cy").get_to(c.cy);
  j.at("width").get_to(c.width);
  j.at("height").get_to(c.height);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SceneConfig, seed, num_points, extent,
                                   trajectory, speed, frame_rate,
                                   low_texture_fraction, images,
                                   max_track_length, track_noise_px,
                                   odom_sigma_t, odom_sigma_r_deg)

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MdeNoiseModel, mode, scale_true,
                                   shift_true, sigma_s, sigma_t,
                                   flicker_sigma, pixel_noise_sigma,
                                   outlier_blob_rate, blob_magnitude_lo,
                                   blob_magnitude_hi)

}  // namespace dvio
