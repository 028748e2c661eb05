// Microbenchmarks for the window-solve hot path: block evaluation and
// normal-equation assembly, serial reference vs the OpenMP kernels, plus the
// full Levenberg-Marquardt solve.

#include <benchmark/benchmark.h>

#include "support/fixtures.hpp"

namespace {

using namespace dvio;
using dvio::testing::make_dense_window;
using dvio::testing::perturb_state;

dvio::testing::WindowFixture& fixture() {
  static auto fx = [] {
    auto f = make_dense_window(10, 150, 42, true, true);
    perturb_state(f.state, 0.03, 0.005, 0.05, 7);
    return f;
  }();
  return fx;
}

void BM_EvaluateSerial(benchmark::State& state) {
  auto& fx = fixture();
  SolverConfig cfg;
  for (auto _ : state) {
    auto eval = evaluate_graph(fx.state, fx.graph, fx.cam, cfg, false);
    benchmark::DoNotOptimize(eval.cost.total());
  }
}
BENCHMARK(BM_EvaluateSerial);

void BM_EvaluateParallel(benchmark::State& state) {
  auto& fx = fixture();
  SolverConfig cfg;
  for (auto _ : state) {
    auto eval = evaluate_graph(fx.state, fx.graph, fx.cam, cfg, true);
    benchmark::DoNotOptimize(eval.cost.total());
  }
}
BENCHMARK(BM_EvaluateParallel);

void BM_Assemble(benchmark::State& state) {
  auto& fx = fixture();
  SolverConfig cfg;
  const auto eval = evaluate_graph(fx.state, fx.graph, fx.cam, cfg, false);
  const auto layout = build_layout(fx.state, fx.graph);
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  for (auto _ : state) {
    assemble_normal_equations(fx.state, fx.graph, eval, layout, cfg, H, b);
    benchmark::DoNotOptimize(b.norm());
  }
}
BENCHMARK(BM_Assemble);

void BM_SolveWindowSerial(benchmark::State& state) {
  SolverConfig cfg;
  cfg.parallel = false;
  cfg.max_iterations = 8;
  for (auto _ : state) {
    auto fx = fixture();  // copy: solve mutates the state
    auto window = fx.state;
    const auto report = solve_window(window, fx.graph, fx.cam, cfg);
    benchmark::DoNotOptimize(report.final_cost.total());
  }
}
BENCHMARK(BM_SolveWindowSerial)->Unit(benchmark::kMillisecond);

void BM_SolveWindowParallel(benchmark::State& state) {
  SolverConfig cfg;
  cfg.parallel = true;
  cfg.max_iterations = 8;
  for (auto _ : state) {
    auto fx = fixture();
    auto window = fx.state;
    const auto report = solve_window(window, fx.graph, fx.cam, cfg);
    benchmark::DoNotOptimize(report.final_cost.total());
  }
}
BENCHMARK(BM_SolveWindowParallel)->Unit(benchmark::kMillisecond);

void BM_DepthMapRender(benchmark::State& state) {
  SceneConfig cfg;
  cfg.seed = 3;
  cfg.num_points = 400;
  const Camera cam = default_camera();
  std::vector<Vec3> points;
  auto rng = make_engine(3, 1);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  for (int i = 0; i < cfg.num_points; ++i) {
    points.emplace_back(u(rng), u(rng), u(rng));
  }
  const Pose pose = trajectory_pose(cfg, 10);
  for (auto _ : state) {
    auto map = render_true_inverse_depth(cfg, points, cam, pose);
    benchmark::DoNotOptimize(map.values.data());
  }
}
BENCHMARK(BM_DepthMapRender)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
