#include "drlab/core/spec.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace drlab {

const char* reward_kind_name(RewardKind kind) {
  switch (kind) {
    case RewardKind::Sum: return "sum";
    case RewardKind::Max: return "max";
    case RewardKind::Square: return "square";
    case RewardKind::WeightedSum: return "weighted_sum";
    case RewardKind::Tabulated: return "tabulated";
  }
  return "?";
}

std::int32_t DrmdpSpec::max_actions() const {
  std::int32_t m = 0;
  for (const auto& names : action_names) {
    m = std::max(m, static_cast<std::int32_t>(names.size()));
  }
  return m;
}

double DrmdpSpec::transition_prob(StateId s, ActionId a, StateId next) const {
  for (const auto& [sp, p] : transition[s][a]) {
    if (sp == next) return p;
  }
  return 0.0;
}

double DrmdpSpec::step_reward_of(const Step& st) const {
  if (st.is_padding()) return 0.0;
  return reward.step_reward[st.state][st.action];
}

bool DrmdpSpec::zero_reward_absorbing(StateId s) const {
  if (num_actions(s) != 1) return false;
  const auto& row = transition[s][0];
  if (row.size() != 1 || row[0].first != s) return false;
  switch (reward.kind) {
    case RewardKind::Sum:
    case RewardKind::Max:
    case RewardKind::Square:
    case RewardKind::WeightedSum:
      return reward.step_reward[s][0] == 0.0;
    case RewardKind::Tabulated: {
      // Every tabulated entry that mentions the self-loop step only must
      // be zero for the state to count as a reward-free sink.
      Step loop{s, 0};
      for (const auto& [steps, value] : reward.table) {
        bool all_loop = true;
        for (const auto& st : steps) {
          if (!(st == loop)) { all_loop = false; break; }
        }
        if (all_loop && value != 0.0) return false;
      }
      return true;
    }
  }
  return false;
}

void DrmdpSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("spec: " + what); };

  const auto n_states = state_names.size();
  if (n_states == 0) fail("no states");
  std::set<std::string> seen(state_names.begin(), state_names.end());
  if (seen.size() != n_states) fail("duplicate state names");
  if (action_names.size() != n_states || transition.size() != n_states) {
    fail("actions/transition tables must cover every state");
  }

  for (std::size_t s = 0; s < n_states; ++s) {
    if (action_names[s].empty()) fail("state '" + state_names[s] + "' has no actions");
    std::set<std::string> aseen(action_names[s].begin(), action_names[s].end());
    if (aseen.size() != action_names[s].size()) {
      fail("duplicate action names at state '" + state_names[s] + "'");
    }
    if (transition[s].size() != action_names[s].size()) {
      fail("transition row count mismatch at state '" + state_names[s] + "'");
    }
    for (std::size_t a = 0; a < transition[s].size(); ++a) {
      double total = 0.0;
      for (const auto& [next, p] : transition[s][a]) {
        if (next < 0 || static_cast<std::size_t>(next) >= n_states) fail("transition to unknown state");
        if (p < 0.0) fail("negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > kProbTolerance) {
        fail("transition row (" + state_names[s] + ", " + action_names[s][a] +
             ") does not sum to 1 within 1e-12");
      }
    }
  }

  double init_total = 0.0;
  for (const auto& [s, p] : initial_dist) {
    if (s < 0 || static_cast<std::size_t>(s) >= n_states) fail("initial mass on unknown state");
    if (p < 0.0) fail("negative initial probability");
    init_total += p;
  }
  if (std::abs(init_total - 1.0) > kProbTolerance) fail("initial distribution does not sum to 1");

  if (!(gamma > 0.0 && gamma < 1.0)) fail("gamma must lie in (0,1)");
  if (overlap_c < 0) fail("overlap must be nonnegative");
  if (interval_law.max_n() <= 0) fail("interval law is empty");

  if (reward.kind != RewardKind::Tabulated) {
    if (reward.step_reward.size() != n_states) fail("per-step reward table must cover every state");
    for (std::size_t s = 0; s < n_states; ++s) {
      if (reward.step_reward[s].size() != action_names[s].size()) {
        fail("per-step reward row mismatch at state '" + state_names[s] + "'");
      }
      for (double r : reward.step_reward[s]) {
        if (!std::isfinite(r)) fail("non-finite per-step reward");
      }
    }
  }
  if (reward.kind == RewardKind::WeightedSum) {
    const std::size_t need = static_cast<std::size_t>(overlap_c + interval_law.max_n());
    if (reward.weights.size() < need) fail("weighted_sum weights must cover every segment slot");
    for (double w : reward.weights) {
      if (w < 0.0 || w > 1.0) fail("weighted_sum weights must lie in [0,1]");
    }
  }
  if ((reward.kind == RewardKind::Max || reward.kind == RewardKind::Square) && overlap_c != 0) {
    fail("max/square rewards are defined for overlap 0 only");
  }
  if (reward.kind == RewardKind::Tabulated) {
    for (const auto& [steps, value] : reward.table) {
      if (!std::isfinite(value)) fail("non-finite tabulated reward");
      for (const auto& st : steps) {
        if (st.is_padding()) continue;
        if (st.state < 0 || static_cast<std::size_t>(st.state) >= n_states) {
          fail("tabulated entry mentions unknown state");
        }
        if (st.action < 0 ||
            static_cast<std::size_t>(st.action) >= action_names[st.state].size()) {
          fail("tabulated entry mentions unknown action");
        }
      }
    }
  }
}

StateId DrmdpSpec::state_id(const std::string& name) const {
  for (std::size_t s = 0; s < state_names.size(); ++s) {
    if (state_names[s] == name) return static_cast<StateId>(s);
  }
  throw std::out_of_range("unknown state '" + name + "'");
}

ActionId DrmdpSpec::action_id(StateId s, const std::string& name) const {
  for (std::size_t a = 0; a < action_names[s].size(); ++a) {
    if (action_names[s][a] == name) return static_cast<ActionId>(a);
  }
  throw std::out_of_range("unknown action '" + name + "' at state '" + state_names[s] + "'");
}

}  // namespace drlab
