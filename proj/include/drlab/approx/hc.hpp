#pragma once

#include <cstdint>
#include <vector>

#include "drlab/approx/mlp.hpp"
#include "drlab/approx/records.hpp"
#include "drlab/core/rng.hpp"

namespace drlab {

// Additive history structures. Padding slots contribute nothing; the
// empty history has value exactly 0.
//
//  Singleton   H(tau) = sum_j b(step_j) over the history's real steps;
//  PairwiseK   H(tau) = sum_j c0(step_j)
//                     + sum_{k=1..K} sum_j ck(step_j ++ step_{j+k}),
//              each ck a separate net over a concatenated step pair.
enum class HKind { Singleton, PairwiseK };

class HStructure {
 public:
  HStructure() = default;
  // `step_dim` = state features + action features per step; `pair_span`
  // is K (ignored for Singleton); hidden layers are `depth` x `width`
  // rectified-linear.
  HStructure(HKind kind, std::int32_t pair_span, std::int32_t step_dim, std::int32_t width,
             std::int32_t depth, Rng& rng);

  HKind kind() const { return kind_; }
  std::int32_t pair_span() const { return pair_span_; }
  std::int32_t step_dim() const { return step_dim_; }
  const std::vector<Mlp>& nets() const { return nets_; }
  std::vector<Mlp>& nets() { return nets_; }

  std::int64_t parameter_count() const;
  std::vector<double> parameters() const;           // concatenated net parameters
  void set_parameters(const std::vector<double>& flat);

  // H over the listed steps (padding slots skipped, in order).
  double value(const std::vector<StepFeatures>& steps) const;
  // Same value; also accumulates seed * dH/dparameters into `grad`
  // (layout = parameters(), length parameter_count()).
  double value_backward(const std::vector<StepFeatures>& steps, double seed,
                        std::vector<double>& grad) const;

 private:
  std::vector<double> step_input(const StepFeatures& step) const;

  HKind kind_ = HKind::Singleton;
  std::int32_t pair_span_ = 0;
  std::int32_t step_dim_ = 0;
  std::vector<Mlp> nets_;
};

// Deterministic policy head: action = tanh net over (state features,
// normalized phase), components in (-1, 1).
class Actor {
 public:
  Actor() = default;
  Actor(std::int32_t state_dim, std::int32_t action_dim, std::int32_t width,
        std::int32_t depth, Rng& rng);

  std::int32_t state_dim() const { return state_dim_; }
  std::int32_t action_dim() const { return action_dim_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }

  std::vector<double> act(const std::vector<double>& state, double phase_norm) const;

 private:
  std::int32_t state_dim_ = 0;
  std::int32_t action_dim_ = 0;
  Mlp net_;
};

// Critic decomposed as history part + current-step part:
//   value(segment) = H(steps before the last) + C(last state, last action,
//   normalized phase),
// exactly, by construction. Live and target copies of both parts.
struct HcConfig {
  HKind kind = HKind::Singleton;
  std::int32_t pair_span = 0;       // K for PairwiseK
  std::int32_t state_dim = 0;
  std::int32_t action_dim = 0;
  std::int32_t width = 64;          // hidden width of every sub-net
  std::int32_t depth = 2;           // hidden layers per sub-net
  std::int32_t max_interval_len = 1;  // normalizes the phase input
  std::int32_t overlap = 0;         // context steps carried across intervals
  double lambda = 0.0;              // weight of the interval-regression term
};

class HcCritic {
 public:
  HcCritic() = default;
  HcCritic(const HcConfig& config, Rng& rng);

  const HcConfig& config() const { return config_; }

  const HStructure& h() const { return h_; }
  HStructure& h() { return h_; }
  const Mlp& c() const { return c_; }
  Mlp& c() { return c_; }
  const HStructure& h_target() const { return h_target_; }
  const Mlp& c_target() const { return c_target_; }

  double phase_norm(std::int32_t phase) const {
    return static_cast<double>(phase) / static_cast<double>(config_.max_interval_len);
  }
  // Input vector of the current-step part: state, action, phase_norm.
  std::vector<double> c_input(const std::vector<double>& state,
                              const std::vector<double>& action, std::int32_t phase) const;

  // H(history part) + C(last step) with live parameters.
  double value(const SegmentFeatures& segment) const;
  double h_value(const SegmentFeatures& segment) const;  // history part only
  double c_value(const SegmentFeatures& segment) const;  // last-step part only

  // Live parameters, concatenated as [h..., c].
  std::int64_t parameter_count() const;
  std::vector<double> parameters() const;
  void set_parameters(const std::vector<double>& flat);

  // target <- tau * live + (1 - tau) * target; tau must lie in (0, 1].
  void soft_update_targets(double tau);

 private:
  HcConfig config_;
  HStructure h_, h_target_;
  Mlp c_, c_target_;
};

// Full-segment comparison critic: one net over a fixed layout of
// (overlap + max interval length) step slots, each slot carrying state
// features, action features, and a validity flag. Slots fill from the
// right, so the current step always occupies the last slot; unused and
// padding slots are zero with validity 0.
class MonolithicCritic {
 public:
  MonolithicCritic() = default;
  MonolithicCritic(std::int32_t overlap, std::int32_t max_interval_len, std::int32_t state_dim,
                   std::int32_t action_dim, std::int32_t width, std::int32_t depth, Rng& rng);

  std::int32_t overlap() const { return overlap_; }
  std::int32_t max_interval_len() const { return max_interval_len_; }
  std::int32_t slots() const { return overlap_ + max_interval_len_; }
  std::int32_t state_dim() const { return state_dim_; }
  std::int32_t action_dim() const { return action_dim_; }
  const Mlp& net() const { return net_; }
  Mlp& net() { return net_; }
  const Mlp& net_target() const { return net_target_; }

  double phase_norm(std::int32_t phase) const {
    return static_cast<double>(phase) / static_cast<double>(max_interval_len_);
  }

  // Throws std::length_error when the segment has more steps than slots.
  std::vector<double> featurize(const SegmentFeatures& segment) const;
  double value(const SegmentFeatures& segment) const;

  void soft_update_targets(double tau);

 private:
  std::int32_t overlap_ = 0;
  std::int32_t max_interval_len_ = 1;
  std::int32_t state_dim_ = 0;
  std::int32_t action_dim_ = 0;
  Mlp net_, net_target_;
};

struct LossResult {
  double loss = 0.0;  // td + weight * reg where a regression term applies
  double td = 0.0;    // squared temporal-difference component
  double reg = 0.0;   // unweighted interval-regression component
  std::vector<double> grad;
};

// Squared temporal-difference error of the decomposed critic on a batch,
// plus lambda times the interval-regression term over the completed
// intervals present in the batch:
//   mean over batch of (R + gamma * (H-target(next history) +
//   C-target(s', a', next phase)) - (H + C))^2 + lambda * L_reg,
// where a' is the policy's action, the next history extends the segment
// within the interval or keeps its last `overlap` steps at interval end,
// and a terminal successor contributes target value 0. Gradients flow
// only into live parameters (layout = HcCritic::parameters()).
// Throws std::invalid_argument on an empty batch or a record whose
// segment is inconsistent with its phase bookkeeping.
LossResult hc_td_loss(const HcCritic& critic, const std::vector<ReplayRecord>& batch,
                      const Actor& policy, double gamma);

// Mean squared error between H on complete intervals (all segment steps,
// final one included) and the realized interval reward, with gradient
// over the structure's parameters.
struct RegSample {
  SegmentFeatures segment;
  double reward = 0.0;
};
LossResult reg_loss(const HStructure& h, const std::vector<RegSample>& completed);

// Gradient, with respect to the policy's parameters, of the batch-mean
// critic value at a = policy(s, phase): only the current-step part
// receives the action, so the chain runs through dC/da alone. Returns
// the ascent direction.
std::vector<double> hc_policy_gradient(const HcCritic& critic,
                                       const std::vector<ReplayRecord>& batch,
                                       const Actor& policy);

// Same contracts for the full-segment comparison critic.
LossResult monolithic_td_loss(const MonolithicCritic& critic,
                              const std::vector<ReplayRecord>& batch, const Actor& policy,
                              double gamma);
std::vector<double> monolithic_trajectory_gradient(const MonolithicCritic& critic,
                                                   const std::vector<ReplayRecord>& batch,
                                                   const Actor& policy);

// Unbiased per-parameter sample variance (divisor m - 1), summed across
// parameters; rows are per-sample gradient slices of equal length.
// Throws std::invalid_argument with fewer than two rows.
double summed_sample_variance(const std::vector<std::vector<double>>& rows);

// Per-sample policy gradients through both critic arms, restricted to the
// policy net's final layer; reports the summed per-parameter sample
// variance of each arm.
struct GradientVarianceProbe {
  const HcCritic* hc = nullptr;
  const MonolithicCritic* monolithic = nullptr;
  const Actor* actor = nullptr;
  std::vector<ReplayRecord> batch;
};
struct VarianceReport {
  double hc_variance = 0.0;
  double monolithic_variance = 0.0;
};
VarianceReport estimate_gradient_variance(const GradientVarianceProbe& probe);

}  // namespace drlab
