#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dvio/estimator.hpp"
#include "dvio/eval/metrics.hpp"
#include "dvio/sim/simulator.hpp"

namespace dvio {

enum class DiftMode { kOff, kInverse, kMetric };

/// One row of the ablation: which integrations are switched on.
struct MethodConfig {
  std::string name = "baseline";
  bool mdi = false;
  bool depth_residuals = false;
  bool ordinal = false;
  DiftMode dift = DiftMode::kOff;
};

struct ExperimentConfig {
  std::string out_dir = "runs/out";
  std::vector<std::uint64_t> seeds = {1};
  int frames = 150;
  int jobs = 1;
  std::vector<std::string> scenes = {"video_like"};
  std::vector<MethodConfig> methods;  // empty -> default ablation set
  double depth_weight = 300.0;
  double ordinal_weight = 10.0;
  bool gating_enabled = true;
  GateConfig gate;
  int window_size = 10;
  // Field-level preset overrides, stored as raw JSON objects.
  std::string scene_overrides_json;
  std::string noise_overrides_json;
};

/// Named scene/noise presets ("video_like", "zero_shot_like", "noise_free").
struct Preset {
  SceneConfig scene;
  MdeNoiseModel noise;
};
std::optional<Preset> lookup_preset(const std::string& name);

/// Parses and strictly validates a config file; unknown fields raise
/// ConfigError naming the offending path.
ExperimentConfig parse_experiment_config_file(const std::string& path);
ExperimentConfig parse_experiment_config_text(const std::string& text);

/// The six-row ablation used when a config lists no methods.
std::vector<MethodConfig> default_ablation_methods();

struct RunResult {
  std::string scene;
  std::string method;
  std::uint64_t seed = 0;
  double ate_rmse = 0.0;
  bool diverged = false;
  bool solver_failed = false;
  int ordinal_violations = 0;
  int constrained_pairs = 0;  // scored (frame, pair) instances
  double mean_activation_latency = 0.0;  // frames from first sight to state
  int activations = 0;
  int mdi_activations = 0;
  double dift_gradient_ratio = 0.0;  // DIFT vs plain grayscale energy
  CostBreakdown final_cost;          // summed over frames
};

struct MethodRunOutput {
  RunResult result;
  std::vector<StampedPose> trajectory;
  std::vector<double> solve_ms;  // per frame (logged, never serialized)
  std::vector<std::pair<int, CostBreakdown>> per_frame_cost;
};

/// Ordinal pairs selected per frame from sequence data alone (locality,
/// margin, temporal consistency, budget). Method-independent, so violation
/// counts are comparable across methods of the same sequence.
std::vector<std::vector<OrdinalPairUse>> canonical_ordinal_pairs(
    const SyntheticSequence& seq, const OrdinalConfig& cfg);

/// State-depth order violations of the run against ground-truth ordering of
/// the scored pairs. Also reports how many (frame, pair) instances were
/// scorable (both landmarks active).
std::pair<int, int> count_ordinal_violations(
    const SyntheticSequence& seq,
    const std::vector<std::vector<OrdinalPairUse>>& pairs_per_frame,
    const std::vector<FrameDiagnostics>& diags);

EstimatorOptions make_estimator_options(const ExperimentConfig& cfg,
                                        const MethodConfig& method,
                                        std::uint64_t seed);

MethodRunOutput run_method_on_sequence(
    const SyntheticSequence& seq, const MethodConfig& method,
    const ExperimentConfig& cfg,
    const std::vector<std::vector<OrdinalPairUse>>* scored_pairs = nullptr);

/// Full grid: for each (scene, seed) generate the sequence once, run every
/// method, write trajectories and per-run results, then aggregate medians
/// and improvements into report.csv / report.md under cfg.out_dir.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace dvio
