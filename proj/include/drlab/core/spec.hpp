#pragma once

#include <string>
#include <utility>
#include <vector>

#include "drlab/core/interval_law.hpp"
#include "drlab/core/reward.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// A finite delayed-reward decision process: Markov transition dynamics,
// an interval-length law q_n, an interval reward functional, a discount,
// and the overlap depth c (how many pre-interval steps the reward may
// read). States and actions are dense ids; action ids are per state.
struct DrmdpSpec {
  std::vector<std::string> state_names;
  std::vector<std::vector<std::string>> action_names;  // [state] -> names

  // transition[s][a]: sparse row of (next state, probability), sums to 1.
  std::vector<std::vector<std::vector<std::pair<StateId, double>>>> transition;

  // Initial state distribution, sparse, sums to 1.
  std::vector<std::pair<StateId, double>> initial_dist;

  IntervalLaw interval_law;
  RewardFunctional reward;
  double gamma = 0.99;
  std::int32_t overlap_c = 0;

  std::int32_t num_states() const { return static_cast<std::int32_t>(state_names.size()); }
  std::int32_t num_actions(StateId s) const {
    return static_cast<std::int32_t>(action_names[s].size());
  }
  std::int32_t max_actions() const;

  double transition_prob(StateId s, ActionId a, StateId next) const;

  // A state is a sink when its only continuation is a self-loop whose
  // every reward contribution is zero; episodic enumeration may stop
  // there. Requires the self-loop to be reward-free under this spec's
  // reward kind (per-step reward 0, or an all-zero Tabulated loop).
  bool zero_reward_absorbing(StateId s) const;

  // Per-step reward rhat(s, a); padding steps yield 0.
  double step_reward_of(const Step& st) const;

  // Structural validation of every invariant above. Throws
  // std::invalid_argument with a description on the first failure.
  void validate() const;

  // Resolve names to ids (throws std::out_of_range when missing).
  StateId state_id(const std::string& name) const;
  ActionId action_id(StateId s, const std::string& name) const;
};

// Tolerance for probability-sum checks.
inline constexpr double kProbTolerance = 1e-12;

}  // namespace drlab
