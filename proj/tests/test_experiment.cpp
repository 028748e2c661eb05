#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dvio/core/errors.hpp"
#include "dvio/exp/experiment.hpp"

using namespace dvio;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
  const auto cfg = parse_experiment_config_text(R"({
    "out": "runs/demo",
    "seeds": [1, 2, 3],
    "frames": 40,
    "jobs": 2,
    "scenes": ["video_like", "zero_shot_like"],
    "weights": {"depth": 120.0, "ordinal": 5.0},
    "gate": {"enabled": true, "gamma": 5000.0, "sigma2_thresh": 0.02,
             "window": 4},
    "methods": [
      {"name": "baseline"},
      {"name": "full", "mdi": true, "depth_residuals": true,
       "ordinal": true, "dift": "off"}
    ],
    "noise_overrides": {"pixel_noise_sigma": 0.0}
  })");
  CHECK(cfg.out_dir == "runs/demo");
  CHECK(cfg.seeds.size() == 3);
  CHECK(cfg.scenes.size() == 2);
  CHECK(cfg.depth_weight == doctest::Approx(120.0));
  CHECK(cfg.gate.window == 4);
  REQUIRE(cfg.methods.size() == 2);
  CHECK(cfg.methods[1].mdi);
}

TEST_CASE("config parsing rejects unknown fields with diagnostics") {
  CHECK_THROWS_WITH_AS(
      parse_experiment_config_text(R"({"seeds": [1], "frmes": 10})"),
      doctest::Contains("frmes"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment_config_text(
                           R"({"seeds": [1], "gate": {"gama": 1.0}})"),
                       doctest::Contains("gama"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config_text(
          R"({"seeds": [1], "methods": [{"name": "x", "dift": "banana"}]})"),
      doctest::Contains("banana"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config_text("not json at all"),
                  ConfigError);
  CHECK_THROWS_AS(parse_experiment_config_text(R"({"seeds": []})"),
                  ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config_text(
          R"({"seeds": [1], "scenes": ["downtown"]})"),
      doctest::Contains("downtown"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config_text(
          R"({"seeds": [1], "noise_overrides": {"flickr": 1.0}})"),
      doctest::Contains("flickr"), ConfigError);
}

TEST_CASE("presets exist and differ in flicker") {
  const auto video = lookup_preset("video_like");
  const auto zero_shot = lookup_preset("zero_shot_like");
  const auto quiet = lookup_preset("noise_free");
  REQUIRE(video);
  REQUIRE(zero_shot);
  REQUIRE(quiet);
  CHECK(zero_shot->noise.flicker_sigma >= 10.0 * video->noise.flicker_sigma);
  CHECK(quiet->noise.flicker_sigma == 0.0);
  CHECK_FALSE(lookup_preset("nope"));
}

TEST_CASE("end-to-end experiment writes deterministic reports") {
  ExperimentConfig cfg;
  cfg.out_dir =
      (fs::temp_directory_path() / "dvio_exp_a").string();
  cfg.seeds = {1, 2};
  cfg.frames = 30;
  cfg.jobs = 2;
  cfg.scenes = {"noise_free"};
  cfg.methods = {MethodConfig{"baseline"},
                 MethodConfig{"depth_mdi", true, true, false, DiftMode::kOff}};
  cfg.scene_overrides_json = R"({"num_points": 150})";

  fs::remove_all(cfg.out_dir);
  run_experiment(cfg);

  ExperimentConfig cfg_b = cfg;
  cfg_b.out_dir = (fs::temp_directory_path() / "dvio_exp_b").string();
  fs::remove_all(cfg_b.out_dir);
  run_experiment(cfg_b);

  CHECK(slurp(fs::path(cfg.out_dir) / "report.csv") ==
        slurp(fs::path(cfg_b.out_dir) / "report.csv"));
  CHECK(slurp(fs::path(cfg.out_dir) / "report.md") ==
        slurp(fs::path(cfg_b.out_dir) / "report.md"));
  CHECK(slurp(fs::path(cfg.out_dir) / "runs.csv") ==
        slurp(fs::path(cfg_b.out_dir) / "runs.csv"));
  for (const auto& method : {"baseline", "depth_mdi"}) {
    for (const auto& seed : {"seed_1", "seed_2"}) {
      const auto rel = fs::path("noise_free") / method / seed;
      CHECK(slurp(fs::path(cfg.out_dir) / rel / "traj.tum") ==
            slurp(fs::path(cfg_b.out_dir) / rel / "traj.tum"));
      CHECK(slurp(fs::path(cfg.out_dir) / rel / "result.json") ==
            slurp(fs::path(cfg_b.out_dir) / rel / "result.json"));
    }
  }

  // Noise-free baseline row reports a (near) zero ATE.
  const std::string report = slurp(fs::path(cfg.out_dir) / "report.csv");
  CHECK(report.find("baseline,0.0000") != std::string::npos);

  fs::remove_all(cfg.out_dir);
  fs::remove_all(cfg_b.out_dir);
}

TEST_CASE("canonical ordinal pairs are deterministic") {
  Preset p = *lookup_preset("video_like");
  p.scene.seed = 4;
  p.scene.num_points = 150;
  const auto seq = generate_sequence(p.scene, p.noise, default_camera(), 25);
  const auto a = canonical_ordinal_pairs(seq, OrdinalConfig{});
  const auto b = canonical_ordinal_pairs(seq, OrdinalConfig{});
  REQUIRE(a.size() == b.size());
  std::size_t total = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a[k].size() == b[k].size());
    total += a[k].size();
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      CHECK(a[k][i].id_i == b[k][i].id_i);
      CHECK(a[k][i].id_j == b[k][i].id_j);
      CHECK(a[k][i].established_order == b[k][i].established_order);
    }
  }
  CHECK(total > 0);
}
