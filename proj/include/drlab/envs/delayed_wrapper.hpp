#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "drlab/core/interval_law.hpp"
#include "drlab/core/reward.hpp"
#include "drlab/core/rng.hpp"
#include "drlab/envs/dense_env.hpp"

namespace drlab {

// Converts an environment paying a per-step reward into a delayed-reward
// stream: rewards are withheld during each signal interval (length drawn
// from the interval law at interval start) and a single aggregate is
// emitted at the interval's last step.
//
//   Sum     aggregate = sum of the per-step rewards; with overlap c > 0
//           the interval pays the window shifted c steps into the past
//           (pre-episode steps count as zero), so each step's reward is
//           paid exactly once, c steps late — except the episode's final
//           c steps, whose rewards are never paid and are tallied in
//           dropped_reward()/dropped_steps().
//   Max     10 x the largest per-step reward of the interval (no overlap).
//   Square  4 x the interval's mean m when |m| < 1, 4 x sign(m) m^2
//           otherwise (no overlap).
//
// An interval cut short by episode termination pays the same formula
// over its realized steps at the final step. Only these three kinds are
// accepted, and a positive overlap only with Sum.
class DelayedRewardWrapper {
 public:
  DelayedRewardWrapper(DenseEnv& inner, RewardKind kind, IntervalLaw law, std::int32_t overlap);

  DenseEnv& inner() { return inner_; }
  RewardKind kind() const { return kind_; }
  const IntervalLaw& interval_law() const { return law_; }
  std::int32_t overlap() const { return overlap_; }

  // Starts an inner episode and draws the first interval length.
  std::vector<double> reset(Rng& rng);

  struct WrappedStep {
    std::vector<double> state;  // successor features
    double reward = 0.0;        // zero except when interval_end
    bool interval_end = false;
    bool done = false;
    std::int32_t phase = 0;  // phase of the step just taken
  };
  // Throws std::logic_error once the episode is done.
  WrappedStep step(const std::vector<double>& action, Rng& rng);

  bool done() const { return done_; }
  std::int32_t interval_len() const { return current_len_; }  // current interval's length

  // Sum-with-overlap bookkeeping: per-step rewards that fell in the final
  // overlap window of a finished episode and were therefore never paid.
  double dropped_reward() const { return dropped_reward_; }
  std::int32_t dropped_steps() const { return dropped_steps_; }

 private:
  double interval_aggregate() const;

  DenseEnv& inner_;
  RewardKind kind_;
  IntervalLaw law_;
  std::int32_t overlap_ = 0;

  bool done_ = true;
  std::int32_t phase_ = 0;
  std::int32_t current_len_ = 1;
  std::int64_t step_index_ = 0;              // steps taken this episode
  std::vector<double> pending_;              // interval's per-step rewards (no overlap)
  std::deque<double> window_;                // trailing rewards for the shifted Sum
  std::int64_t window_start_ = 0;            // step index of window_.front()
  std::int64_t next_unpaid_ = 0;             // first step index not yet paid (Sum)
  double dropped_reward_ = 0.0;
  std::int32_t dropped_steps_ = 0;
};

}  // namespace drlab
