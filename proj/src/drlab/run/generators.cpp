#include "drlab/run/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "drlab/core/analysis.hpp"

namespace drlab {

namespace {

IntervalLaw random_interval_law(Rng& rng, std::int32_t max_len) {
  std::vector<std::int32_t> support;
  for (std::int32_t n = 1; n <= max_len; ++n) {
    if (rng.uniform() < 0.5) support.push_back(n);
  }
  if (support.empty()) support.push_back(1 + rng.below(max_len));
  std::vector<double> pmf(support.size());
  double total = 0.0;
  for (double& p : pmf) {
    p = 0.2 + rng.uniform();
    total += p;
  }
  for (double& p : pmf) p /= total;
  // Re-normalize exactly so validation's 1e-12 sum check cannot drift.
  pmf.back() = 1.0 - std::accumulate(pmf.begin(), pmf.end() - 1, 0.0);
  return IntervalLaw(std::move(support), std::move(pmf));
}

std::vector<std::pair<StateId, double>> random_sparse_dist(Rng& rng,
                                                           const std::vector<StateId>& pool) {
  std::vector<StateId> chosen = pool;
  const std::size_t want = 1 + rng.below(std::min<std::size_t>(pool.size(), 2));
  for (std::size_t i = 0; i + 1 < chosen.size(); ++i) {
    std::swap(chosen[i], chosen[i + rng.below(chosen.size() - i)]);
  }
  chosen.resize(want);
  std::sort(chosen.begin(), chosen.end());
  std::vector<std::pair<StateId, double>> dist;
  double total = 0.0;
  for (StateId s : chosen) {
    dist.emplace_back(s, 0.2 + rng.uniform());
    total += dist.back().second;
  }
  for (auto& [s, p] : dist) p /= total;
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < dist.size(); ++i) head += dist[i].second;
  dist.back().second = 1.0 - head;
  return dist;
}

}  // namespace

DrmdpSpec random_layered_spec(Rng& rng, RewardKind kind, std::int32_t overlap) {
  if (kind == RewardKind::Max || kind == RewardKind::Square) overlap = 0;
  const std::int32_t num_layers = 2 + static_cast<std::int32_t>(rng.below(3));  // 2..4

  DrmdpSpec spec;
  std::vector<std::vector<StateId>> layers(num_layers);
  std::int32_t budget = 5;  // core states; one slot per layer is reserved
  for (std::int32_t l = 0; l < num_layers; ++l) {
    std::int32_t width = 1;
    if (budget - (num_layers - l) > 0 && rng.uniform() < 0.5) width = 2;
    budget -= width;
    for (std::int32_t i = 0; i < width; ++i) {
      layers[l].push_back(static_cast<StateId>(spec.state_names.size()));
      spec.state_names.push_back("L" + std::to_string(l) + "_" + std::to_string(i));
    }
  }
  const StateId sink = static_cast<StateId>(spec.state_names.size());
  spec.state_names.push_back("sink");

  spec.action_names.resize(spec.state_names.size());
  spec.transition.resize(spec.state_names.size());
  spec.reward.kind = kind;
  spec.reward.step_reward.resize(spec.state_names.size());

  for (std::int32_t l = 0; l < num_layers; ++l) {
    const std::vector<StateId> next_pool =
        (l + 1 < num_layers) ? layers[l + 1] : std::vector<StateId>{sink};
    for (StateId s : layers[l]) {
      const std::int32_t num_actions = 1 + static_cast<std::int32_t>(rng.below(3));
      for (ActionId a = 0; a < num_actions; ++a) {
        spec.action_names[s].push_back("a" + std::to_string(a));
        spec.transition[s].push_back(random_sparse_dist(rng, next_pool));
        // Layer-increasing positive rewards keep Max-form rewards ordered
        // by depth, which is what makes the Max family past-invariant.
        const double r = (kind == RewardKind::Max) ? (l + 0.1 + 0.8 * rng.uniform())
                                                   : (4.0 * rng.uniform() - 2.0);
        spec.reward.step_reward[s].push_back(r);
      }
    }
  }
  spec.action_names[sink] = {"stay"};
  spec.transition[sink] = {{{sink, 1.0}}};
  spec.reward.step_reward[sink] = {0.0};

  spec.initial_dist = random_sparse_dist(rng, layers[0]);
  spec.interval_law = random_interval_law(rng, 4);
  spec.gamma = 0.3 + 0.6 * rng.uniform();
  spec.overlap_c = overlap;
  if (kind == RewardKind::WeightedSum) {
    spec.reward.weights.resize(overlap + spec.interval_law.max_n());
    for (double& w : spec.reward.weights) w = rng.uniform();
  }
  spec.validate();
  return spec;
}

DrmdpSpec random_cyclic_spec(Rng& rng, std::int32_t overlap, bool mixed_lengths) {
  const std::int32_t num_states = 2 + static_cast<std::int32_t>(rng.below(3));  // 2..4
  DrmdpSpec spec;
  for (std::int32_t s = 0; s < num_states; ++s) {
    spec.state_names.push_back("s" + std::to_string(s));
  }
  spec.action_names.resize(num_states);
  spec.transition.resize(num_states);
  spec.reward.step_reward.resize(num_states);
  for (StateId s = 0; s < num_states; ++s) {
    const std::int32_t num_actions = 1 + static_cast<std::int32_t>(rng.below(2));
    for (ActionId a = 0; a < num_actions; ++a) {
      spec.action_names[s].push_back("a" + std::to_string(a));
      // Deterministic successor; bias toward the next state so every
      // state stays reachable, with random shortcuts for variety.
      const StateId succ = (rng.uniform() < 0.6)
                               ? static_cast<StateId>((s + 1) % num_states)
                               : static_cast<StateId>(rng.below(num_states));
      spec.transition[s].push_back({{succ, 1.0}});
      spec.reward.step_reward[s].push_back(4.0 * rng.uniform() - 2.0);
    }
  }
  spec.initial_dist = {{0, 1.0}};
  const bool both = mixed_lengths && rng.uniform() < 0.6;
  spec.interval_law = both ? IntervalLaw({1, 2}, {0.5, 0.5}) : IntervalLaw::fixed(2);
  spec.gamma = 0.3 + 0.3 * rng.uniform();
  spec.overlap_c = overlap;
  if (rng.uniform() < 0.4) {
    spec.reward.kind = RewardKind::WeightedSum;
    spec.reward.weights.resize(overlap + spec.interval_law.max_n());
    for (double& w : spec.reward.weights) w = rng.uniform();
  } else {
    spec.reward.kind = RewardKind::Sum;
  }
  spec.validate();
  return spec;
}

DrmdpSpec random_pi_spec(Rng& rng, bool allow_max) {
  for (std::int32_t attempt = 0; attempt < 64; ++attempt) {
    const double pick = rng.uniform();
    RewardKind kind = RewardKind::Sum;
    if (allow_max && pick < 0.3) {
      kind = RewardKind::Max;
    } else if (pick < 0.6) {
      kind = RewardKind::WeightedSum;
    }
    const std::int32_t overlap =
        (kind == RewardKind::Max) ? 0 : static_cast<std::int32_t>(rng.below(3));
    DrmdpSpec spec = random_layered_spec(rng, kind, overlap);
    // Sum and WeightedSum decompose additively over slots, so they are
    // past-invariant by construction; the brute-force check is the
    // arbiter for Max.
    const std::int32_t max_len = spec.overlap_c + spec.interval_law.max_n();
    if (check_pi_condition(spec, max_len).holds) return spec;
  }
  throw std::runtime_error("random_pi_spec: rejection sampling failed to find a PI spec");
}

PolicyS random_policy(Rng& rng, const DrmdpSpec& spec, bool deterministic) {
  PolicyS policy(spec);
  for (StateId s = 0; s < spec.num_states(); ++s) {
    const std::int32_t num_actions = spec.num_actions(s);
    for (std::int32_t phase = 0; phase < spec.interval_law.max_n(); ++phase) {
      if (deterministic) {
        policy.set_deterministic(s, phase, static_cast<ActionId>(rng.below(num_actions)));
        continue;
      }
      std::vector<double> row(num_actions);
      double total = 0.0;
      for (double& p : row) {
        p = 0.1 + rng.uniform();
        total += p;
      }
      for (double& p : row) p /= total;
      double head = 0.0;
      for (std::int32_t a = 0; a + 1 < num_actions; ++a) head += row[a];
      row.back() = 1.0 - head;
      policy.set_row(s, phase, std::move(row));
    }
  }
  return policy;
}

}  // namespace drlab
