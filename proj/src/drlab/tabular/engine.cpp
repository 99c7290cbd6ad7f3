#include "drlab/tabular/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "drlab/core/analysis.hpp"

namespace drlab {

namespace {

// Depth-first enumeration of every continuation of `seg`, accumulating
// discounted interval rewards into `total`. `mass` is the branch's
// probability, `disc` the discount relative to the root key's final step,
// `depth` the number of steps taken beyond the root.
void enumerate_continuations(const DrmdpSpec& spec, const PolicyS& policy,
                             const TrajectorySegment& seg, double mass, double disc,
                             std::int32_t depth, std::int32_t horizon_cap, double mass_cutoff,
                             double& total) {
  if (mass * disc < mass_cutoff) return;
  if (depth > horizon_cap) {
    throw std::length_error(
        "continuation enumeration exceeded the horizon cap with unresolved probability mass");
  }
  const std::int32_t k = seg.current_len();
  const double h = spec.interval_law.hazard(k);
  const Step last = seg.last();
  const auto& row = spec.transition[last.state][last.action];

  if (h > 0.0) {
    total += mass * h * disc * evaluate_reward(spec, seg);
    const TrajectorySegment restart = restart_context(spec, seg);
    for (const auto& [next_state, prob] : row) {
      if (interval_start_terminates(spec, next_state, restart.steps)) continue;
      for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
        const double pi = policy.prob(next_state, 0, a);
        if (pi <= 0.0) continue;
        enumerate_continuations(spec, policy, extend_segment(restart, Step{next_state, a}),
                                mass * h * prob * pi, disc * spec.gamma, depth + 1, horizon_cap,
                                mass_cutoff, total);
      }
    }
  }
  if (h < 1.0) {
    for (const auto& [next_state, prob] : row) {
      for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
        const double pi = policy.prob(next_state, k, a);
        if (pi <= 0.0) continue;
        enumerate_continuations(spec, policy, extend_segment(seg, Step{next_state, a}),
                                mass * (1.0 - h) * prob * pi, disc * spec.gamma, depth + 1,
                                horizon_cap, mass_cutoff, total);
      }
    }
  }
}

}  // namespace

double exact_q_value(const DrmdpSpec& spec, const PolicyS& policy, const TrajectorySegment& key,
                     std::int32_t horizon_cap, double mass_cutoff) {
  double total = 0.0;
  enumerate_continuations(spec, policy, key, 1.0, 1.0, 0, horizon_cap, mass_cutoff, total);
  return total;
}

TrajectoryQTable exact_q_by_enumeration(const DrmdpSpec& spec, const PolicyS& policy,
                                        std::int32_t horizon_cap, double mass_cutoff,
                                        std::int64_t key_cap) {
  TrajectoryQTable table = TrajectoryQTable::zero(spec, key_cap, horizon_cap);
  for (auto& [key, value] : table.entries()) {
    value = exact_q_value(spec, policy, key, horizon_cap, mass_cutoff);
  }
  return table;
}

TrajectoryQTable bellman_sweep(const TrajectoryQTable& target, const PolicyS& policy) {
  const DrmdpSpec& spec = target.spec();
  TrajectoryQTable out = target;
  for (auto& [key, value] : out.entries()) {
    const std::int32_t k = key.current_len();
    const double h = spec.interval_law.hazard(k);
    const Step last = key.last();
    const auto& row = spec.transition[last.state][last.action];

    double result = 0.0;
    if (h < 1.0) {
      double cont = 0.0;
      for (const auto& [next_state, prob] : row) {
        for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
          const double pi = policy.prob(next_state, k, a);
          if (pi <= 0.0) continue;
          cont += prob * pi * target.value(extend_segment(key, Step{next_state, a}));
        }
      }
      result += (1.0 - h) * spec.gamma * cont;
    }
    if (h > 0.0) {
      double boot = 0.0;
      const TrajectorySegment restart = restart_context(spec, key);
      for (const auto& [next_state, prob] : row) {
        if (interval_start_terminates(spec, next_state, restart.steps)) continue;
        for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
          const double pi = policy.prob(next_state, 0, a);
          if (pi <= 0.0) continue;
          boot += prob * pi * target.value(extend_segment(restart, Step{next_state, a}));
        }
      }
      result += h * (evaluate_reward(spec, key) + spec.gamma * boot);
    }
    value = result;
  }
  return out;
}

FixedPointResult solve_fixed_point(const DrmdpSpec& spec, const PolicyS& policy, double tol,
                                   std::int32_t max_sweeps, std::int64_t key_cap) {
  if (tol <= 0.0) throw std::invalid_argument("solve_fixed_point: tol must be positive");
  FixedPointResult result;
  result.table = TrajectoryQTable::zero(spec, key_cap);
  for (std::int32_t sweep = 0; sweep < max_sweeps; ++sweep) {
    TrajectoryQTable next = bellman_sweep(result.table, policy);
    const double residual = next.sup_distance(result.table);
    result.table = std::move(next);
    ++result.sweeps;
    if (residual < tol) {
      result.final_residual = residual;
      return result;
    }
  }
  throw std::runtime_error("solve_fixed_point: did not converge within the sweep budget");
}

double j_value(const TrajectoryQTable& table, const PolicyS& policy) {
  const DrmdpSpec& spec = table.spec();
  TrajectorySegment start;
  start.prefix_len = spec.overlap_c;
  start.steps.assign(spec.overlap_c, Step{});
  double j = 0.0;
  for (const auto& [s0, p0] : spec.initial_dist) {
    if (interval_start_terminates(spec, s0, start.steps)) continue;
    for (ActionId a = 0; a < spec.num_actions(s0); ++a) {
      const double pi = policy.prob(s0, 0, a);
      if (pi <= 0.0) continue;
      j += p0 * pi * table.value(extend_segment(start, Step{s0, a}));
    }
  }
  return j;
}

namespace {

// Shared episode-distribution walk for both policy classes. `choose`
// maps (history segment, state) to the action distribution.
template <typename ChooseRow>
void enumerate_episodes(const DrmdpSpec& spec, const ChooseRow& choose,
                        const TrajectorySegment& segment, StateId state, double mass,
                        double disc, std::int32_t depth, std::int32_t horizon_cap,
                        double mass_cutoff, double& total) {
  if (mass * disc < mass_cutoff) return;
  if (depth > horizon_cap) {
    throw std::length_error(
        "episode enumeration exceeded the horizon cap with unresolved probability mass");
  }
  for (ActionId a = 0; a < spec.num_actions(state); ++a) {
    const double pi = choose(segment, state, a);
    if (pi <= 0.0) continue;
    TrajectorySegment taken = extend_segment(segment, Step{state, a});
    const double h = spec.interval_law.hazard(taken.current_len());
    if (h > 0.0) {
      // Reward lands at the interval's final step: discount gamma^(t-1)
      // relative to episode start, where disc already equals gamma^t at
      // the step about to be taken.
      total += mass * pi * h * disc * evaluate_reward(spec, taken);
      const TrajectorySegment restart = restart_context(spec, taken);
      for (const auto& [next_state, prob] : spec.transition[state][a]) {
        if (interval_start_terminates(spec, next_state, restart.steps)) continue;
        enumerate_episodes(spec, choose, restart, next_state, mass * pi * h * prob,
                           disc * spec.gamma, depth + 1, horizon_cap, mass_cutoff, total);
      }
    }
    if (h < 1.0) {
      for (const auto& [next_state, prob] : spec.transition[state][a]) {
        enumerate_episodes(spec, choose, taken, next_state, mass * pi * (1.0 - h) * prob,
                           disc * spec.gamma, depth + 1, horizon_cap, mass_cutoff, total);
      }
    }
  }
}

template <typename ChooseRow>
double exact_return_impl(const DrmdpSpec& spec, const ChooseRow& choose,
                         std::int32_t horizon_cap, double mass_cutoff) {
  TrajectorySegment start;
  start.prefix_len = spec.overlap_c;
  start.steps.assign(spec.overlap_c, Step{});
  double total = 0.0;
  for (const auto& [s0, p0] : spec.initial_dist) {
    if (interval_start_terminates(spec, s0, start.steps)) continue;
    enumerate_episodes(spec, choose, start, s0, p0, 1.0, 0, horizon_cap, mass_cutoff, total);
  }
  return total;
}

}  // namespace

double exact_return(const DrmdpSpec& spec, const PolicyS& policy, std::int32_t horizon_cap,
                    double mass_cutoff) {
  return exact_return_impl(
      spec,
      [&](const TrajectorySegment& segment, StateId state, ActionId a) {
        return policy.prob(state, segment.current_len(), a);
      },
      horizon_cap, mass_cutoff);
}

double exact_return(const DrmdpSpec& spec, const PolicyTau& policy, std::int32_t horizon_cap,
                    double mass_cutoff) {
  return exact_return_impl(
      spec,
      [&](const TrajectorySegment& segment, StateId state, ActionId a) {
        return policy.prob({segment, state}, a);
      },
      horizon_cap, mass_cutoff);
}

PolicyS policy_improve(const TrajectoryQTable& table, ImproveReport* report) {
  const DrmdpSpec& spec = table.spec();
  const std::int32_t num_phases = spec.interval_law.max_n();

  // First feasible history per (state, phase), in table (= lexicographic)
  // order: the canonical history is the lexicographically smallest.
  std::map<std::pair<StateId, std::int32_t>, TrajectorySegment> canonical;
  for (const auto& [key, value] : table.entries()) {
    (void)value;
    const std::pair<StateId, std::int32_t> slot{key.last().state, key.last_phase()};
    if (canonical.count(slot)) continue;
    TrajectorySegment history = key;
    history.steps.pop_back();
    canonical.emplace(slot, std::move(history));
  }

  PolicyS improved(spec);
  for (StateId s = 0; s < spec.num_states(); ++s) {
    for (std::int32_t phase = 0; phase < num_phases; ++phase) {
      auto it = canonical.find({s, phase});
      if (it == canonical.end()) {
        if (report) report->unreachable_rows.emplace_back(s, phase);
        if (phase == 0) {
          improved.set_deterministic(s, 0, 0);
        } else {
          improved.set_row(s, phase, improved.row(s, 0));
        }
        continue;
      }
      ActionId best = 0;
      double best_value = table.value(extend_segment(it->second, Step{s, 0}));
      for (ActionId a = 1; a < spec.num_actions(s); ++a) {
        const double v = table.value(extend_segment(it->second, Step{s, a}));
        if (v > best_value) {
          best_value = v;
          best = a;
        }
      }
      improved.set_deterministic(s, phase, best);
    }
  }
  return improved;
}

OrderCheckReport check_order_invariance(const TrajectoryQTable& table, double tie_tol) {
  const DrmdpSpec& spec = table.spec();
  OrderCheckReport report;

  // values[(s, phase)][history] -> per-action values (the closure puts
  // every action of a feasible history in the table).
  std::map<std::pair<StateId, std::int32_t>, std::map<TrajectorySegment, std::vector<double>>>
      groups;
  for (const auto& [key, value] : table.entries()) {
    const Step last = key.last();
    TrajectorySegment history = key;
    history.steps.pop_back();
    auto& per_action = groups[{last.state, key.last_phase()}][std::move(history)];
    if (per_action.empty()) per_action.resize(spec.num_actions(last.state));
    per_action[last.action] = value;
  }

  const auto sign_of = [tie_tol](double d) { return (std::abs(d) <= tie_tol) ? 0 : (d > 0 ? 1 : -1); };
  for (const auto& [slot, histories] : groups) {
    const std::int32_t num_actions = spec.num_actions(slot.first);
    if (num_actions < 2 || histories.size() < 2) continue;
    for (auto it1 = histories.begin(); it1 != histories.end(); ++it1) {
      for (auto it2 = std::next(it1); it2 != histories.end(); ++it2) {
        for (ActionId a = 0; a < num_actions; ++a) {
          for (ActionId b = a + 1; b < num_actions; ++b) {
            ++report.comparisons;
            const int s1 = sign_of(it1->second[a] - it1->second[b]);
            const int s2 = sign_of(it2->second[a] - it2->second[b]);
            if (s1 != s2) {
              report.holds = false;
              std::ostringstream msg;
              msg.precision(17);
              msg << "value ordering of actions " << a << " vs " << b << " at state "
                  << spec.state_names[slot.first] << " phase " << slot.second
                  << " flips between histories " << table.format_key(it1->first) << " ("
                  << it1->second[a] << " vs " << it1->second[b] << ") and "
                  << table.format_key(it2->first) << " (" << it2->second[a] << " vs "
                  << it2->second[b] << ")";
              report.witness = msg.str();
              return report;
            }
          }
        }
      }
    }
  }
  return report;
}

PolicyIterationResult policy_iteration(const DrmdpSpec& spec, const PolicyS& initial,
                                       std::int32_t max_rounds, double tol,
                                       std::int64_t key_cap) {
  PolicyIterationResult result;
  result.policies.push_back(initial);
  for (std::int32_t round = 0; round < max_rounds; ++round) {
    const PolicyS& current = result.policies.back();
    FixedPointResult fp = solve_fixed_point(spec, current, tol, 100'000, key_cap);
    result.returns.push_back(j_value(fp.table, current));
    PolicyS next = policy_improve(fp.table);
    if (std::find(result.policies.begin(), result.policies.end(), next) !=
        result.policies.end()) {
      result.converged = true;
      return result;
    }
    result.policies.push_back(std::move(next));
  }
  // Evaluate the final iterate so returns and policies stay aligned.
  FixedPointResult fp = solve_fixed_point(spec, result.policies.back(), tol, 100'000, key_cap);
  result.returns.push_back(j_value(fp.table, result.policies.back()));
  return result;
}

}  // namespace drlab
