#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "dvio/core/errors.hpp"
#include "dvio/exp/experiment.hpp"
#include "dvio/sim/sim_json.hpp"

namespace {

using namespace dvio;
namespace fs = std::filesystem;

int cmd_generate(const std::string& preset_name, std::uint64_t seed,
                 int frames, const std::string& out, bool images,
                 const std::string& trajectory) {
  auto preset = lookup_preset(preset_name);
  if (!preset) throw ConfigError("unknown preset '" + preset_name + "'");
  preset->scene.seed = seed;
  preset->scene.images = images;
  if (!trajectory.empty()) {
    if (trajectory == "circle") {
      preset->scene.trajectory = TrajectoryKind::kCircle;
    } else if (trajectory == "lawnmower") {
      preset->scene.trajectory = TrajectoryKind::kLawnmower;
    } else if (trajectory == "corridor") {
      preset->scene.trajectory = TrajectoryKind::kCorridor;
    } else {
      throw ConfigError("unknown trajectory '" + trajectory + "'");
    }
  }
  const auto seq = generate_sequence(preset->scene, preset->noise,
                                     default_camera(), frames);
  save_sequence(out, seq);
  std::cout << "wrote " << seq.frames.size() << " frames to " << out << "\n";
  return 0;
}

MethodConfig method_from_name(const std::string& name) {
  for (const auto& m : default_ablation_methods()) {
    if (m.name == name) return m;
  }
  if (name == "dift_metric") {
    return MethodConfig{"dift_metric", false, false, false, DiftMode::kMetric};
  }
  throw ConfigError("unknown method '" + name + "'");
}

int cmd_run(const std::string& sequence_dir, const std::string& method_name,
            const std::string& out, double w_depth, double w_ordinal,
            bool no_gating) {
  const SyntheticSequence seq = load_sequence(sequence_dir);
  const MethodConfig method = method_from_name(method_name);

  ExperimentConfig cfg;
  cfg.depth_weight = w_depth;
  cfg.ordinal_weight = w_ordinal;
  cfg.gating_enabled = !no_gating;

  const auto scored = canonical_ordinal_pairs(seq, OrdinalConfig{});
  MethodRunOutput run = run_method_on_sequence(seq, method, cfg, &scored);
  run.result.scene = sequence_dir;

  fs::create_directories(out);
  save_tum_trajectory((fs::path(out) / "traj.tum").string(), run.trajectory);

  nlohmann::json j;
  j["method"] = method.name;
  j["sequence"] = sequence_dir;
  j["ate_rmse"] = std::isfinite(run.result.ate_rmse)
                      ? nlohmann::json(run.result.ate_rmse)
                      : nlohmann::json(nullptr);
  j["diverged"] = run.result.diverged;
  j["ordinal_violations"] = run.result.ordinal_violations;
  j["mean_activation_latency"] = run.result.mean_activation_latency;
  j["activations"] = run.result.activations;
  j["mdi_activations"] = run.result.mdi_activations;
  std::ofstream((fs::path(out) / "result.json").string())
      << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const std::string& est_path, const std::string& gt_path,
                 const std::string& out) {
  const auto est = load_tum_trajectory(est_path);
  const auto gt = load_tum_trajectory(gt_path);
  const auto ate = ate_rmse(est, gt);
  const bool diverged = divergence_check(est, gt, /*solver_failed=*/false);

  nlohmann::json j;
  j["ate_rmse"] = ate ? nlohmann::json(*ate) : nlohmann::json(nullptr);
  j["matched_poses"] =
      static_cast<int>(associate(est, gt, AteOptions{}.max_gap_s).size());
  j["diverged"] = diverged;
  std::cout << j.dump(2) << "\n";
  if (!out.empty()) {
    std::ofstream(out) << j.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliding-window VIO backend with learned-depth priors"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic sequence");
  std::string gen_preset = "video_like", gen_out = "sequence";
  std::string gen_traj;
  std::uint64_t gen_seed = 1;
  int gen_frames = 150;
  bool gen_images = false;
  gen->add_option("--preset", gen_preset, "noise preset name");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--frames", gen_frames, "number of frames");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--images", gen_images, "render synthetic RGB frames");
  gen->add_option("--trajectory", gen_traj, "circle|lawnmower|corridor");

  // run
  auto* run = app.add_subcommand("run", "Run the estimator on a sequence");
  std::string run_seq, run_out = "run_out", run_method = "baseline";
  double run_wd = 300.0, run_wo = 10.0;
  bool run_no_gating = false;
  run->add_option("--sequence", run_seq, "sequence directory")->required();
  run->add_option("--method", run_method,
                  "baseline|mdi|depth_mdi|orc_mdi|depth_orc_mdi|dift_inverse|"
                  "dift_metric");
  run->add_option("--out", run_out, "output directory");
  run->add_option("--depth-weight", run_wd, "w_D");
  run->add_option("--ordinal-weight", run_wo, "w_O");
  run->add_flag("--no-gating", run_no_gating, "disable variance gating");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "ATE of a trajectory vs truth");
  std::string eval_est, eval_gt, eval_out;
  eval->add_option("--est", eval_est, "estimated trajectory (TUM)")
      ->required();
  eval->add_option("--gt", eval_gt, "ground truth trajectory (TUM)")
      ->required();
  eval->add_option("--out", eval_out, "optional JSON output path");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Full ablation experiment");
  std::string ablate_config, ablate_out;
  int ablate_jobs = 0;
  ablate->add_option("--config", ablate_config, "experiment config (JSON)")
      ->required();
  ablate->add_option("--out", ablate_out, "override output directory");
  ablate->add_option("--jobs", ablate_jobs, "parallel runs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(gen_preset, gen_seed, gen_frames, gen_out,
                          gen_images, gen_traj);
    }
    if (run->parsed()) {
      return cmd_run(run_seq, run_method, run_out, run_wd, run_wo,
                     run_no_gating);
    }
    if (eval->parsed()) {
      return cmd_evaluate(eval_est, eval_gt, eval_out);
    }
    if (ablate->parsed()) {
      ExperimentConfig cfg = parse_experiment_config_file(ablate_config);
      if (!ablate_out.empty()) cfg.out_dir = ablate_out;
      if (ablate_jobs > 0) cfg.jobs = ablate_jobs;
      run_experiment(cfg);
      return 0;
    }
  } catch (const dvio::ConfigError& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"kind", "config"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 1;
  } catch (const dvio::IoError& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"kind", "io"}, {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error",
                                 {{"kind", "internal"},
                                  {"message", e.what()}}}}
                     .dump()
              << "\n";
    return 3;
  }
  return 3;
}
