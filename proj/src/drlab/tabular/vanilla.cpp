#include "drlab/tabular/vanilla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "drlab/core/analysis.hpp"
#include "drlab/tabular/engine.hpp"

namespace drlab {

namespace {

// Exploration depth for the epsilon -> 0 off-policy limit: paths with
// more forced off-policy actions than this are dropped (their occurrence
// weight is of higher order in epsilon than anything they could tie).
constexpr std::int32_t kDeviationCap = 6;
constexpr std::int64_t kPathNodeCap = 4'000'000;

// Aggregated occurrences of one (s, a) pair at one exploration order:
// total weight, reward-weighted total, and the weighted bootstrap
// distribution over (next state, next phase) of non-terminal records.
struct Bucket {
  double weight = 0.0;
  double weighted_reward = 0.0;
  std::map<std::pair<StateId, std::int32_t>, double> bootstrap;
};

struct RecordTable {
  // records[s][a]: exploration order -> aggregated occurrences.
  std::vector<std::vector<std::map<std::int32_t, Bucket>>> records;
};

// Enumerates the episode distribution of `policy` (with minimal forced
// exploration for off-policy reach) and aggregates the per-step critic
// records. `segment` holds the current interval's prefix + steps, `state`
// the state awaiting an action.
void enumerate_records(const DrmdpSpec& spec, const PolicyS& policy,
                       const TrajectorySegment& segment, StateId state, double mass,
                       std::int32_t deviations, std::int32_t depth, std::int32_t horizon_cap,
                       std::int64_t& nodes, RecordTable& table) {
  if (mass < 1e-12) return;
  if (depth > horizon_cap) {
    throw std::length_error(
        "per-step record enumeration exceeded the horizon cap: spec is not episodic");
  }
  if (++nodes > kPathNodeCap) {
    throw std::length_error("per-step record enumeration exceeded the node cap");
  }

  const std::int32_t phase = segment.current_len();
  const std::int32_t num_actions = spec.num_actions(state);
  for (ActionId a = 0; a < num_actions; ++a) {
    const double pi = policy.prob(state, phase, a);
    const bool deviated = pi <= 0.0;
    if (deviated && deviations >= kDeviationCap) continue;
    const double action_w = deviated ? 1.0 / num_actions : pi;
    const std::int32_t dev = deviations + (deviated ? 1 : 0);

    TrajectorySegment taken = extend_segment(segment, Step{state, a});
    const double h = spec.interval_law.hazard(taken.current_len());
    Bucket& bucket = table.records[state][a][dev];

    if (h > 0.0) {
      const double reward = evaluate_reward(spec, taken);
      const TrajectorySegment restart = restart_context(spec, taken);
      for (const auto& [next_state, prob] : spec.transition[state][a]) {
        const double w = mass * action_w * h * prob;
        bucket.weight += w;
        bucket.weighted_reward += w * reward;
        if (interval_start_terminates(spec, next_state, restart.steps)) continue;
        bucket.bootstrap[{next_state, 0}] += w;
        enumerate_records(spec, policy, restart, next_state, w, dev, depth + 1, horizon_cap,
                          nodes, table);
      }
    }
    if (h < 1.0) {
      for (const auto& [next_state, prob] : spec.transition[state][a]) {
        const double w = mass * action_w * (1.0 - h) * prob;
        bucket.weight += w;
        bucket.bootstrap[{next_state, taken.current_len()}] += w;
        enumerate_records(spec, policy, taken, next_state, w, dev, depth + 1, horizon_cap, nodes,
                          table);
      }
    }
  }
}

}  // namespace

StateQTable vanilla_q_fixed_point(const DrmdpSpec& spec, const PolicyS& policy, double tol,
                                  std::int32_t max_iters, std::int32_t horizon_cap) {
  RecordTable table;
  table.records.resize(spec.num_states());
  for (StateId s = 0; s < spec.num_states(); ++s) {
    table.records[s].resize(spec.num_actions(s));
  }

  TrajectorySegment start;
  start.prefix_len = spec.overlap_c;
  start.steps.assign(spec.overlap_c, Step{});
  std::int64_t nodes = 0;
  for (const auto& [s0, p0] : spec.initial_dist) {
    if (interval_start_terminates(spec, s0, start.steps)) continue;
    enumerate_records(spec, policy, start, s0, p0, 0, 0, horizon_cap, nodes, table);
  }

  // Keep each entry's minimal exploration order and normalize within it.
  struct Entry {
    double reward = 0.0;  // weight-normalized expected immediate reward
    std::vector<std::pair<std::pair<StateId, std::int32_t>, double>> bootstrap;  // normalized
  };
  std::map<std::pair<StateId, ActionId>, Entry> entries;
  for (StateId s = 0; s < spec.num_states(); ++s) {
    for (ActionId a = 0; a < spec.num_actions(s); ++a) {
      const auto& buckets = table.records[s][a];
      auto it = std::find_if(buckets.begin(), buckets.end(),
                             [](const auto& kv) { return kv.second.weight > 0.0; });
      if (it == buckets.end()) continue;
      const Bucket& bucket = it->second;
      Entry entry;
      entry.reward = bucket.weighted_reward / bucket.weight;
      for (const auto& [next, w] : bucket.bootstrap) {
        entry.bootstrap.emplace_back(next, w / bucket.weight);
      }
      entries.emplace(std::make_pair(s, a), std::move(entry));
    }
  }

  // Fixed point of Q(s,a) = E[R + gamma * V(next)] under those weights,
  // with V(s', k') = sum_a' pi(a'|s',k') Q(s',a'). The weighted bootstrap
  // row sums are <= 1, so the iteration contracts at rate gamma.
  StateQTable q;
  for (const auto& [key, entry] : entries) {
    (void)entry;
    q.entries[key] = 0.0;
  }
  for (std::int32_t iter = 0; iter < max_iters; ++iter) {
    double residual = 0.0;
    for (const auto& [key, entry] : entries) {
      double value = entry.reward;
      for (const auto& [next, w] : entry.bootstrap) {
        double v_next = 0.0;
        for (ActionId a = 0; a < spec.num_actions(next.first); ++a) {
          const double pi = policy.prob(next.first, next.second, a);
          if (pi <= 0.0) continue;
          v_next += pi * q.entries.at({next.first, a});
        }
        value += spec.gamma * w * v_next;
      }
      double& slot = q.entries.at(key);
      residual = std::max(residual, std::abs(value - slot));
      slot = value;
    }
    if (residual < tol) return q;
  }
  throw std::runtime_error("vanilla_q_fixed_point: did not converge within the budget");
}

PolicyS greedy_improve_state_q(const DrmdpSpec& spec, const StateQTable& q) {
  PolicyS improved(spec);
  const std::int32_t num_phases = spec.interval_law.max_n();
  for (StateId s = 0; s < spec.num_states(); ++s) {
    ActionId best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (ActionId a = 0; a < spec.num_actions(s); ++a) {
      if (!q.defined(s, a)) continue;
      const double v = q.value(s, a);
      if (v > best_value) {
        best_value = v;
        best = a;
      }
    }
    for (std::int32_t phase = 0; phase < num_phases; ++phase) {
      improved.set_deterministic(s, phase, best);
    }
  }
  return improved;
}

VanillaIterationResult vanilla_iteration(const DrmdpSpec& spec, const PolicyS& initial,
                                         std::int32_t max_rounds) {
  VanillaIterationResult result;
  result.policies.push_back(initial);
  for (std::int32_t round = 0; round < max_rounds; ++round) {
    const PolicyS& current = result.policies.back();
    result.returns.push_back(j_value(solve_fixed_point(spec, current).table, current));
    StateQTable q = vanilla_q_fixed_point(spec, current);
    PolicyS next = greedy_improve_state_q(spec, q);
    if (std::find(result.policies.begin(), result.policies.end(), next) !=
        result.policies.end()) {
      result.converged = true;
      return result;
    }
    result.policies.push_back(std::move(next));
  }
  const PolicyS& last = result.policies.back();
  result.returns.push_back(j_value(solve_fixed_point(spec, last).table, last));
  return result;
}

std::string OffPolicyBiasReport::describe() const {
  std::ostringstream out;
  for (const auto& row : rows) {
    out << "state " << row.state << " action " << row.action << ": expected target "
        << row.expected_target << '\n';
  }
  return out.str();
}

OffPolicyBiasReport off_policy_bias_report(const DrmdpSpec& spec,
                                           const std::vector<PolicyS>& behaviors, StateId state,
                                           std::int32_t position) {
  if (behaviors.empty()) {
    throw std::invalid_argument("off_policy_bias_report: behaviors list is empty");
  }
  if (state < 0 || state >= spec.num_states()) {
    throw std::invalid_argument("off_policy_bias_report: bad state id");
  }
  if (position < 0 || position >= spec.interval_law.max_n()) {
    throw std::invalid_argument("off_policy_bias_report: bad within-interval position");
  }

  // All histories tau_{0:position} that land in `state` at the position,
  // with their pre-action reward sums and per-behavior probabilities.
  struct History {
    double pre_reward = 0.0;
    std::vector<double> prob;  // per behavior
  };
  std::vector<History> histories;

  struct Frame {
    StateId state;
    double pre_reward;
    std::vector<double> prob;
  };
  std::vector<Frame> frontier;
  for (const auto& [s0, p0] : spec.initial_dist) {
    frontier.push_back({s0, 0.0, std::vector<double>(behaviors.size(), p0)});
  }
  for (std::int32_t t = 0; t < position; ++t) {
    std::vector<Frame> next_frontier;
    for (const Frame& frame : frontier) {
      for (ActionId a = 0; a < spec.num_actions(frame.state); ++a) {
        for (const auto& [next_state, prob] : spec.transition[frame.state][a]) {
          Frame next{next_state, frame.pre_reward + spec.step_reward_of({frame.state, a}), {}};
          next.prob.reserve(behaviors.size());
          double mass = 0.0;
          for (std::size_t k = 0; k < behaviors.size(); ++k) {
            const double w = frame.prob[k] * behaviors[k].prob(frame.state, t, a) * prob;
            next.prob.push_back(w);
            mass += w;
          }
          if (mass > 0.0) next_frontier.push_back(std::move(next));
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  std::vector<double> reach(behaviors.size(), 0.0);  // per-behavior P(s_position = state)
  for (Frame& frame : frontier) {
    if (frame.state != state) continue;
    histories.push_back({frame.pre_reward, std::move(frame.prob)});
    for (std::size_t k = 0; k < behaviors.size(); ++k) {
      reach[k] += histories.back().prob[k];
    }
  }

  OffPolicyBiasReport report;
  for (ActionId a = 0; a < spec.num_actions(state); ++a) {
    // Mixture weight of behavior k on (state, a): its preference for the
    // action, renormalized across behaviors (equal episode shares).
    double mix_total = 0.0;
    std::vector<double> mix(behaviors.size(), 0.0);
    for (std::size_t k = 0; k < behaviors.size(); ++k) {
      if (reach[k] <= 0.0) continue;
      mix[k] = behaviors[k].prob(state, position, a);
      mix_total += mix[k];
    }
    if (mix_total <= 0.0) {
      throw std::invalid_argument(
          "off_policy_bias_report: no behavior reaches the queried state-action pair");
    }
    double target = 0.0;
    for (const History& h : histories) {
      double rho = 0.0;
      for (std::size_t k = 0; k < behaviors.size(); ++k) {
        if (reach[k] <= 0.0 || mix[k] <= 0.0) continue;
        rho += (mix[k] / mix_total) * (h.prob[k] / reach[k]);
      }
      target += rho * h.pre_reward;
    }
    report.rows.push_back({state, a, target});
  }
  return report;
}

DrmdpSpec off_policy_bias_example_spec(double gamma) {
  DrmdpSpec spec;
  spec.state_names = {"S", "M0", "M1", "Z", "W"};
  spec.action_names = {{"u0", "u1"}, {"m"}, {"m"}, {"z0", "z1"}, {"stay"}};
  const StateId S = 0, M0 = 1, M1 = 2, Z = 3, W = 4;
  spec.transition.resize(5);
  spec.transition[S] = {{{M0, 1.0}}, {{M1, 1.0}}};
  spec.transition[M0] = {{{Z, 1.0}}};
  spec.transition[M1] = {{{Z, 1.0}}};
  spec.transition[Z] = {{{W, 1.0}}, {{W, 1.0}}};
  spec.transition[W] = {{{W, 1.0}}};
  spec.initial_dist = {{S, 1.0}};
  spec.interval_law = IntervalLaw::fixed(3);
  spec.reward.kind = RewardKind::Sum;
  spec.reward.step_reward = {{0.0, 0.0}, {0.0}, {1.0}, {0.0, 0.0}, {0.0}};
  spec.gamma = gamma;
  spec.overlap_c = 0;
  spec.validate();
  return spec;
}

std::vector<PolicyS> off_policy_bias_example_behaviors(const DrmdpSpec& spec, bool skewed) {
  PolicyS b1(spec);
  PolicyS b2(spec);
  if (skewed) {
    const StateId S = spec.state_id("S");
    const StateId Z = spec.state_id("Z");
    b1.set_row(S, 0, {0.9, 0.1});
    b1.set_row(Z, 2, {0.9, 0.1});
    b2.set_row(S, 0, {0.1, 0.9});
    b2.set_row(Z, 2, {0.1, 0.9});
  }
  return {b1, b2};
}

}  // namespace drlab
