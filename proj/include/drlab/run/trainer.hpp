#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/envs/heatmap.hpp"
#include "drlab/run/run_config.hpp"

namespace drlab {

// One evaluation checkpoint: greedy (noise-free) rollouts of the current
// policy on a fresh environment.
struct EvalPoint {
  std::int64_t env_step = 0;
  double return_mean = 0.0;             // undiscounted episodic return
  double steps_to_target_median = 0.0;  // step limit when the target was missed
};

// Everything a finished run leaves behind. The metrics CSV (header
// kMetricsHeader) and the parameter snapshot are also on disk at the
// recorded paths.
struct TrainOutcome {
  TrainAlgo algo = TrainAlgo::HcDecomposition;
  std::int32_t seed = 0;
  std::vector<EvalPoint> evals;
  // Gradient-variance probe means over the whole run (NaN when no probe ran).
  double mean_hc_grad_var = 0.0;
  double mean_mono_grad_var = 0.0;
  std::int64_t policy_updates = 0;
  std::string metrics_path;
  std::string snapshot_path;

  double best_steps_to_target_median() const;   // min over checkpoints
  double final_steps_to_target_median() const;  // last checkpoint
};

// Fixed column order of the per-seed metrics CSV. Loss columns are means
// since the previous row; variance columns are probe means since the
// previous row; NaN marks quantities that do not exist for the run (the
// regression term when lambda = 0, probe columns when probing is off or
// for the redistribution baseline).
inline constexpr const char* kMetricsHeader =
    "env_step,eval_return_mean,steps_to_target_median,td_loss,reg_loss,hc_grad_var,"
    "mono_grad_var";

// Runs the delayed-reward training loop on the arena task: act with the
// phase-conditioned policy (uniform random during warmup, then mean
// action plus uniform exploration noise), store one trajectory record
// per step, and per gradient step update the decomposed critic by
// temporal difference, the policy by the current-step value gradient,
// and the target copies by soft blending. When probing is enabled, two
// extra critics (one decomposed, one whole-segment) are trained on the
// same batches purely to measure policy-gradient variance. Deterministic
// per (config, seed); a non-finite loss aborts with std::runtime_error
// naming the step. Writes <dir>/hc_metrics_seed<seed>.csv and
// <dir>/hc_snapshot_seed<seed>.txt.
TrainOutcome train_hc(const RunConfig& config, std::int32_t seed);

// Comparison arm: same loop and budget, but the critic is an ordinary
// state-action network and every step of a signal interval receives the
// interval's reward as its guidance reward (redistribution); the policy
// ignores the phase. Writes ircr_metrics_seed<seed>.csv and
// ircr_snapshot_seed<seed>.txt.
TrainOutcome train_ircr(const RunConfig& config, std::int32_t seed);

// Dispatches to train_hc or train_ircr per config.algo.
TrainOutcome train(const RunConfig& config, std::int32_t seed);

// Rebuilds the additive history structure and the policy from a snapshot
// written by train_hc and renders the arena heatmap (single-step net at
// cell centers, policy action at phase 0).
Heatmap heatmap_from_snapshot(const std::string& snapshot_path);

}  // namespace drlab
