#pragma once

#include <vector>

#include "dvio/graph/residuals.hpp"
#include "dvio/graph/window.hpp"

namespace dvio {

struct ReprojectionBlock {
  FeatureId feature = -1;
  int anchor_kf = -1;
  int obs_kf = -1;
  Vec2 anchor_px = Vec2::Zero();
  Vec2 obs_px = Vec2::Zero();
};

struct OdometryBlock {
  int kf_a = -1;
  int kf_b = -1;
  Pose measured;              // relative pose of b in a's frame
  Vec6 sqrt_info = Vec6::Ones();  // diagonal, [translation; rotation]
};

struct DepthBlock {
  FeatureId feature = -1;
  double aligned_prior = 0.0;  // s * d_mde + t, metric inverse depth
  double weight = 0.0;         // w_D * w_gate
};

struct OrdinalBlock {
  // Oriented so the network asserts inv_depth(feature_i) > inv_depth(feature_j).
  FeatureId feature_i = -1;
  FeatureId feature_j = -1;
  double weight = 0.0;  // w_O
};

/// Residual blocks of one sliding-window solve (the four families of the
/// total cost).
struct FactorGraph {
  std::vector<ReprojectionBlock> reprojection;
  std::vector<OdometryBlock> odometry;
  std::vector<DepthBlock> depth;
  std::vector<OrdinalBlock> ordinal;

  std::size_t size() const {
    return reprojection.size() + odometry.size() + depth.size() +
           ordinal.size();
  }
};

struct SolverConfig {
  int max_iterations = 12;
  double lambda_init = 1e-4;
  double lambda_shrink = 0.3;
  double lambda_grow = 10.0;
  int max_step_retries = 8;
  double rel_decrease_tol = 1e-9;
  double abs_cost_floor = 1e-18;
  double huber_delta_px = 1.0;     // robust kernel on reprojection residuals
  double pixel_sigma = 0.5;        // reprojection measurement std, pixels
  double inv_depth_min = 1e-4;     // clamp bounds after each accepted step
  double inv_depth_max = 1e3;
  bool parallel = true;            // OpenMP block evaluation
  OrdinalConfig ordinal;           // hinge margin coefficient
};

struct CostBreakdown {
  double reprojection = 0.0;
  double odometry = 0.0;
  double depth = 0.0;
  double ordinal = 0.0;

  double total() const { return reprojection + odometry + depth + ordinal; }
};

/// Per-block evaluations plus the family cost subtotals at one state.
/// Block slots are written independently, so results are identical between
/// the serial and the OpenMP evaluation paths.
struct GraphEvaluation {
  std::vector<ReprojectionEval> reprojection;
  std::vector<OdometryEval> odometry;
  std::vector<double> depth_residual;
  std::vector<double> ordinal_residual_value;
  CostBreakdown cost;
  int dropped_blocks = 0;  // reprojection blocks behind a camera
};

GraphEvaluation evaluate_graph(const WindowState& state,
                               const FactorGraph& graph, const Camera& cam,
                               const SolverConfig& cfg, bool parallel);

enum class SolveStatus {
  kConverged,
  kMaxIterations,
  kNoProgress,            // no lambda produced a cost decrease
  kSingularNormalEquations,
};

struct SolveReport {
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;
  std::vector<double> cost_trace;  // accepted-step costs, non-increasing
  CostBreakdown initial_cost;
  CostBreakdown final_cost;
  double wall_ms = 0.0;
};

/// Mapping from free states to columns of the normal equations.
struct ParamLayout {
  std::vector<int> pose_offset;                 // -1 for fixed poses
  std::map<FeatureId, int> landmark_offset;     // only landmarks in blocks
  int size = 0;
};

ParamLayout build_layout(const WindowState& state, const FactorGraph& graph);

/// Gradient and Gauss-Newton Hessian of the total cost. Accumulation runs
/// serially in block order, so the result does not depend on thread count.
void assemble_normal_equations(const WindowState& state,
                               const FactorGraph& graph,
                               const GraphEvaluation& eval,
                               const ParamLayout& layout,
                               const SolverConfig& cfg, Eigen::MatrixXd& H,
                               Eigen::VectorXd& b);

/// Levenberg-Marquardt over the window. Requires at least one fixed pose;
/// without a gauge the normal equations are singular and the solve reports
/// kSingularNormalEquations without touching the state.
SolveReport solve_window(WindowState& state, const FactorGraph& graph,
                         const Camera& cam, const SolverConfig& cfg);

}  // namespace dvio
