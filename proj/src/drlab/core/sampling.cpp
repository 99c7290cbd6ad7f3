#include "drlab/core/sampling.hpp"

#include <functional>

#include "drlab/core/rng.hpp"

namespace drlab {

namespace {

// Shared episode driver; `choose` maps (history-so-far segment, state,
// phase) to an action.
EpisodeTrace run_episode(
    const DrmdpSpec& spec, std::uint64_t rng_seed, std::int32_t horizon,
    const std::function<ActionId(const TrajectorySegment&, StateId, std::int32_t)>& choose) {
  Rng rng(rng_seed);
  const std::int32_t c = spec.overlap_c;

  // Draw the initial state.
  std::vector<double> init_weights;
  init_weights.reserve(spec.initial_dist.size());
  for (const auto& [s, p] : spec.initial_dist) init_weights.push_back(p);
  StateId state = spec.initial_dist[rng.categorical(init_weights)].first;

  EpisodeTrace trace;
  std::vector<Step> history;  // all realized steps of the episode
  std::int32_t t = 0;

  while (t < horizon) {
    IntervalRecord record;
    record.segment.prefix_len = c;
    const std::int32_t realized = std::min<std::int32_t>(c, t);
    record.segment.steps.assign(c - realized, Step{kPaddingState, kPaddingAction});
    record.segment.steps.insert(record.segment.steps.end(), history.end() - realized,
                                history.end());

    if (interval_start_terminates(spec, state, record.segment.steps)) break;

    const std::int32_t n = spec.interval_law.sample_from_uniform(rng.uniform());

    std::int32_t k = 0;
    for (; k < n && t < horizon; ++k, ++t) {
      const ActionId a = choose(record.segment, state, k);
      Step step{state, a};
      record.segment.steps.push_back(step);
      history.push_back(step);

      std::vector<double> weights;
      const auto& row = spec.transition[state][a];
      weights.reserve(row.size());
      for (const auto& [next, p] : row) weights.push_back(p);
      state = row[rng.categorical(weights)].first;
    }
    record.length = k;

    if (k == n) {
      record.reward = evaluate_reward(spec, record.segment);
    } else {
      record.truncated = true;
      trace.truncated_mid_interval = true;
      auto r = evaluate_reward_truncated(spec, record.segment);
      record.reward_defined = r.has_value();
      record.reward = r.value_or(0.0);
    }
    trace.intervals.push_back(std::move(record));
  }
  return trace;
}

}  // namespace

EpisodeTrace sample_episode(const DrmdpSpec& spec, const PolicyS& policy,
                            std::uint64_t rng_seed, std::int32_t horizon) {
  Rng action_rng(rng_seed ^ 0x5bf0'3635'dc1d'9c2bull);
  return run_episode(spec, rng_seed, horizon,
                     [&](const TrajectorySegment&, StateId s, std::int32_t phase) {
                       return static_cast<ActionId>(action_rng.categorical(policy.row(s, phase)));
                     });
}

EpisodeTrace sample_episode(const DrmdpSpec& spec, const PolicyTau& policy,
                            std::uint64_t rng_seed, std::int32_t horizon) {
  Rng action_rng(rng_seed ^ 0x5bf0'3635'dc1d'9c2bull);
  return run_episode(spec, rng_seed, horizon,
                     [&](const TrajectorySegment& seg, StateId s, std::int32_t) {
                       PolicyTau::Key key{seg, s};
                       std::vector<double> row(spec.num_actions(s));
                       for (ActionId a = 0; a < spec.num_actions(s); ++a) {
                         row[a] = policy.prob(key, a);
                       }
                       return static_cast<ActionId>(action_rng.categorical(row));
                     });
}

}  // namespace drlab
