#include "dvio/graph/solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

namespace dvio {

namespace {

// Cost charged to a reprojection block whose point moved behind a camera.
// Keeps the total comparable across states while the block contributes no
// gradient (dropped for the iteration).
constexpr double kInvalidResidualPx = 1e4;

double huber_cost(double e, double delta) {
  return e <= delta ? e * e : delta * (2.0 * e - delta);
}

double huber_weight(double e, double delta) {
  return e <= delta ? 1.0 : delta / e;
}

void apply_step(WindowState& state, const ParamLayout& layout,
                const Eigen::VectorXd& delta, const SolverConfig& cfg) {
  for (std::size_t i = 0; i < state.keyframes.size(); ++i) {
    const int off = layout.pose_offset[i];
    if (off < 0) continue;
    state.keyframes[i].pose =
        state.keyframes[i].pose.boxplus(delta.segment<6>(off));
  }
  for (auto& [id, lm] : state.landmarks) {
    auto it = layout.landmark_offset.find(id);
    if (it == layout.landmark_offset.end()) continue;
    lm.inv_depth = std::clamp(lm.inv_depth + delta(it->second),
                              cfg.inv_depth_min, cfg.inv_depth_max);
  }
}

}  // namespace

GraphEvaluation evaluate_graph(const WindowState& state,
                               const FactorGraph& graph, const Camera& cam,
                               const SolverConfig& cfg, bool parallel) {
  GraphEvaluation eval;
  eval.reprojection.resize(graph.reprojection.size());
  eval.odometry.resize(graph.odometry.size());
  eval.depth_residual.resize(graph.depth.size());
  eval.ordinal_residual_value.resize(graph.ordinal.size());

  const auto n_reproj = static_cast<std::int64_t>(graph.reprojection.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n_reproj; ++i) {
    const auto& blk = graph.reprojection[i];
    eval.reprojection[i] = evaluate_reprojection(
        state.keyframes[blk.anchor_kf].pose, state.keyframes[blk.obs_kf].pose,
        cam, blk.anchor_px, blk.obs_px,
        state.landmarks.at(blk.feature).inv_depth);
  }

  const auto n_odom = static_cast<std::int64_t>(graph.odometry.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n_odom; ++i) {
    const auto& blk = graph.odometry[i];
    eval.odometry[i] =
        evaluate_odometry(state.keyframes[blk.kf_a].pose,
                          state.keyframes[blk.kf_b].pose, blk.measured);
  }

  const auto n_depth = static_cast<std::int64_t>(graph.depth.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n_depth; ++i) {
    const auto& blk = graph.depth[i];
    eval.depth_residual[i] = evaluate_depth_residual(
        state.landmarks.at(blk.feature).inv_depth, blk.aligned_prior);
  }

  const auto n_ord = static_cast<std::int64_t>(graph.ordinal.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n_ord; ++i) {
    const auto& blk = graph.ordinal[i];
    eval.ordinal_residual_value[i] = ordinal_residual(
        state.landmarks.at(blk.feature_i).inv_depth,
        state.landmarks.at(blk.feature_j).inv_depth, cfg.ordinal);
  }

  // Cost subtotals accumulate serially in block order: the trace and all
  // termination decisions are independent of the thread count.
  const double w_px = 1.0 / (cfg.pixel_sigma * cfg.pixel_sigma);
  for (std::int64_t i = 0; i < n_reproj; ++i) {
    const auto& ev = eval.reprojection[i];
    if (!ev.valid) {
      eval.cost.reprojection +=
          w_px * huber_cost(kInvalidResidualPx, cfg.huber_delta_px);
      ++eval.dropped_blocks;
      continue;
    }
    eval.cost.reprojection += w_px * huber_cost(ev.r.norm(),
                                                cfg.huber_delta_px);
  }
  for (std::int64_t i = 0; i < n_odom; ++i) {
    const Vec6 wr =
        graph.odometry[i].sqrt_info.cwiseProduct(eval.odometry[i].r);
    eval.cost.odometry += wr.squaredNorm();
  }
  for (std::int64_t i = 0; i < n_depth; ++i) {
    eval.cost.depth += graph.depth[i].weight * eval.depth_residual[i] *
                       eval.depth_residual[i];
  }
  for (std::int64_t i = 0; i < n_ord; ++i) {
    eval.cost.ordinal += graph.ordinal[i].weight *
                         eval.ordinal_residual_value[i] *
                         eval.ordinal_residual_value[i];
  }
  return eval;
}

ParamLayout build_layout(const WindowState& state, const FactorGraph& graph) {
  ParamLayout layout;
  layout.pose_offset.assign(state.keyframes.size(), -1);
  for (std::size_t i = 0; i < state.keyframes.size(); ++i) {
    if (!state.keyframes[i].fixed) {
      layout.pose_offset[i] = layout.size;
      layout.size += 6;
    }
  }

  std::set<FeatureId> referenced;
  for (const auto& blk : graph.reprojection) referenced.insert(blk.feature);
  for (const auto& blk : graph.depth) referenced.insert(blk.feature);
  for (const auto& blk : graph.ordinal) {
    referenced.insert(blk.feature_i);
    referenced.insert(blk.feature_j);
  }
  for (const auto& [id, lm] : state.landmarks) {
    if (referenced.count(id)) {
      layout.landmark_offset.emplace(id, layout.size);
      layout.size += 1;
    }
  }
  for (FeatureId id : referenced) {
    if (!layout.landmark_offset.count(id)) {
      throw std::invalid_argument(
          "factor graph references a landmark missing from the window");
    }
  }
  return layout;
}

void assemble_normal_equations(const WindowState& state,
                               const FactorGraph& graph,
                               const GraphEvaluation& eval,
                               const ParamLayout& layout,
                               const SolverConfig& cfg, Eigen::MatrixXd& H,
                               Eigen::VectorXd& b) {
  H.setZero(layout.size, layout.size);
  b.setZero(layout.size);
  const double w_px = 1.0 / (cfg.pixel_sigma * cfg.pixel_sigma);

  // Generic rank-update helper over the (param, jacobian) pairs of a block.
  auto add_pair = [&](int off_p, const auto& J_p, int off_q, const auto& J_q,
                      double w) {
    if (off_p < 0 || off_q < 0) return;
    H.block(off_p, off_q, J_p.cols(), J_q.cols()).noalias() +=
        w * J_p.transpose() * J_q;
    if (off_p != off_q) {
      H.block(off_q, off_p, J_q.cols(), J_p.cols()).noalias() +=
          w * J_q.transpose() * J_p;
    }
  };

  for (std::size_t i = 0; i < graph.reprojection.size(); ++i) {
    const auto& ev = eval.reprojection[i];
    if (!ev.valid) continue;
    const auto& blk = graph.reprojection[i];
    const double w = w_px * huber_weight(ev.r.norm(), cfg.huber_delta_px);
    const int off_a = layout.pose_offset[blk.anchor_kf];
    const int off_b = layout.pose_offset[blk.obs_kf];
    const int off_d = layout.landmark_offset.at(blk.feature);

    add_pair(off_a, ev.J_anchor, off_a, ev.J_anchor, w);
    add_pair(off_a, ev.J_anchor, off_b, ev.J_obs, w);
    add_pair(off_b, ev.J_obs, off_b, ev.J_obs, w);
    add_pair(off_a, ev.J_anchor, off_d, ev.J_inv_depth, w);
    add_pair(off_b, ev.J_obs, off_d, ev.J_inv_depth, w);
    add_pair(off_d, ev.J_inv_depth, off_d, ev.J_inv_depth, w);
    if (off_a >= 0) b.segment<6>(off_a) += w * ev.J_anchor.transpose() * ev.r;
    if (off_b >= 0) b.segment<6>(off_b) += w * ev.J_obs.transpose() * ev.r;
    b(off_d) += w * ev.J_inv_depth.dot(ev.r);
  }

  for (std::size_t i = 0; i < graph.odometry.size(); ++i) {
    const auto& blk = graph.odometry[i];
    const auto& ev = eval.odometry[i];
    const Vec6 info = blk.sqrt_info.cwiseProduct(blk.sqrt_info);
    const Mat6 WJa = info.asDiagonal() * ev.J_a;
    const Mat6 WJb = info.asDiagonal() * ev.J_b;
    const int off_a = layout.pose_offset[blk.kf_a];
    const int off_b = layout.pose_offset[blk.kf_b];
    if (off_a >= 0) {
      H.block<6, 6>(off_a, off_a).noalias() += ev.J_a.transpose() * WJa;
      b.segment<6>(off_a) += ev.J_a.transpose() * info.cwiseProduct(ev.r);
    }
    if (off_b >= 0) {
      H.block<6, 6>(off_b, off_b).noalias() += ev.J_b.transpose() * WJb;
      b.segment<6>(off_b) += ev.J_b.transpose() * info.cwiseProduct(ev.r);
    }
    if (off_a >= 0 && off_b >= 0) {
      const Mat6 Hab = ev.J_a.transpose() * WJb;
      H.block<6, 6>(off_a, off_b).noalias() += Hab;
      H.block<6, 6>(off_b, off_a).noalias() += Hab.transpose();
    }
  }

  for (std::size_t i = 0; i < graph.depth.size(); ++i) {
    const auto& blk = graph.depth[i];
    const int off = layout.landmark_offset.at(blk.feature);
    H(off, off) += blk.weight;  // J = 1
    b(off) += blk.weight * eval.depth_residual[i];
  }

  for (std::size_t i = 0; i < graph.ordinal.size(); ++i) {
    const auto& blk = graph.ordinal[i];
    const double d_i = state.landmarks.at(blk.feature_i).inv_depth;
    const double d_j = state.landmarks.at(blk.feature_j).inv_depth;
    double j_di = 0.0, j_dj = 0.0;
    ordinal_jacobian(d_i, d_j, cfg.ordinal, j_di, j_dj);
    if (j_di == 0.0 && j_dj == 0.0) continue;
    const double r = eval.ordinal_residual_value[i];
    const int off_i = layout.landmark_offset.at(blk.feature_i);
    const int off_j = layout.landmark_offset.at(blk.feature_j);
    H(off_i, off_i) += blk.weight * j_di * j_di;
    H(off_j, off_j) += blk.weight * j_dj * j_dj;
    H(off_i, off_j) += blk.weight * j_di * j_dj;
    H(off_j, off_i) += blk.weight * j_di * j_dj;
    b(off_i) += blk.weight * j_di * r;
    b(off_j) += blk.weight * j_dj * r;
  }
}

SolveReport solve_window(WindowState& state, const FactorGraph& graph,
                         const Camera& cam, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;

  auto finish = [&]() {
    report.wall_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  };

  if (state.fixed_count() == 0) {
    // Unconstrained gauge: the normal equations carry a global null space.
    report.status = SolveStatus::kSingularNormalEquations;
    finish();
    return report;
  }

  const ParamLayout layout = build_layout(state, graph);
  GraphEvaluation eval = evaluate_graph(state, graph, cam, cfg, cfg.parallel);
  report.initial_cost = eval.cost;
  report.cost_trace.push_back(eval.cost.total());

  if (layout.size == 0) {
    report.final_cost = eval.cost;
    report.status = SolveStatus::kConverged;
    finish();
    return report;
  }

  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  double lambda = cfg.lambda_init;
  double cost = eval.cost.total();
  report.status = SolveStatus::kMaxIterations;

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    if (cost < cfg.abs_cost_floor) {
      report.status = SolveStatus::kConverged;
      break;
    }
    assemble_normal_equations(state, graph, eval, layout, cfg, H, b);
    // States touched only by inactive hinges gain a unit diagonal; their
    // gradient is zero so the step leaves them untouched.
    for (int i = 0; i < layout.size; ++i) {
      if (H(i, i) == 0.0) H(i, i) = 1.0;
    }

    bool accepted = false;
    bool any_finite = false;
    for (int attempt = 0; attempt < cfg.max_step_retries; ++attempt) {
      Eigen::MatrixXd H_lm = H;
      H_lm.diagonal() += lambda * H.diagonal();
      const Eigen::VectorXd delta = H_lm.ldlt().solve(-b);
      if (!delta.allFinite()) {
        lambda *= cfg.lambda_grow;
        continue;
      }
      any_finite = true;

      WindowState candidate = state;
      apply_step(candidate, layout, delta, cfg);
      GraphEvaluation cand_eval =
          evaluate_graph(candidate, graph, cam, cfg, cfg.parallel);
      if (cand_eval.cost.total() < cost) {
        state = std::move(candidate);
        eval = std::move(cand_eval);
        lambda = std::max(lambda * cfg.lambda_shrink, 1e-12);
        accepted = true;
        break;
      }
      lambda *= cfg.lambda_grow;
    }

    if (!accepted) {
      report.status = any_finite ? SolveStatus::kNoProgress
                                 : SolveStatus::kSingularNormalEquations;
      break;
    }

    ++report.iterations;
    const double new_cost = eval.cost.total();
    report.cost_trace.push_back(new_cost);
    const double decrease = cost - new_cost;
    cost = new_cost;
    if (decrease < cfg.rel_decrease_tol * std::max(cost, 1e-300)) {
      report.status = SolveStatus::kConverged;
      break;
    }
  }

  report.final_cost = eval.cost;
  finish();
  return report;
}

}  // namespace dvio
