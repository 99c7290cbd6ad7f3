#pragma once

#include <map>
#include <vector>

#include "drlab/core/spec.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// Phase-indexed policy class Pi_s: pi(a | s, phase) with phase = t - t_i
// in {0, ..., max interval length - 1}. Rows sum to 1 within 1e-12.
class PolicyS {
 public:
  PolicyS() = default;
  explicit PolicyS(const DrmdpSpec& spec);  // uniform over each state's actions

  static PolicyS uniform(const DrmdpSpec& spec);

  double prob(StateId s, std::int32_t phase, ActionId a) const;
  void set_row(StateId s, std::int32_t phase, std::vector<double> probs);
  const std::vector<double>& row(StateId s, std::int32_t phase) const;

  // Make the policy deterministic at (s, phase).
  void set_deterministic(StateId s, std::int32_t phase, ActionId a);

  std::int32_t num_phases() const { return num_phases_; }
  std::int32_t num_states() const { return static_cast<std::int32_t>(rows_.size()) / std::max<std::int32_t>(num_phases_, 1); }

  // Validates row sums against the spec's action counts.
  void validate(const DrmdpSpec& spec) const;

  friend bool operator==(const PolicyS&, const PolicyS&) = default;

 private:
  // rows_[s * num_phases_ + phase] -> probability vector over actions of s.
  std::vector<std::vector<double>> rows_;
  std::int32_t num_phases_ = 0;
};

// History-conditioned policy class Pi_tau (and Pi_{tau,c}): the action
// distribution may depend on the whole within-interval history (plus the
// c-step overlap prefix) and the current state. Keys pair the history
// segment (steps strictly before t; current_len may be 0 at interval
// starts) with the state awaiting an action.
class PolicyTau {
 public:
  struct Key {
    TrajectorySegment history;  // steps of the current interval before t (+ prefix)
    StateId state = 0;

    friend bool operator==(const Key&, const Key&) = default;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  double prob(const Key& key, ActionId a) const;
  void set_row(Key key, std::vector<double> probs);
  void set_deterministic(Key key, ActionId a, std::int32_t num_actions);
  bool defined(const Key& key) const { return rows_.count(key) > 0; }
  const std::map<Key, std::vector<double>>& rows() const { return rows_; }

 private:
  std::map<Key, std::vector<double>> rows_;
};

}  // namespace drlab
