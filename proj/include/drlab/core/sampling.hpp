#pragma once

#include <cstdint>
#include <variant>

#include "drlab/core/analysis.hpp"
#include "drlab/core/policy.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// Realizes the generative process of a delayed-reward decision process:
// interval lengths i.i.d. from the interval law, actions from the policy
// (phase-indexed for PolicyS, history-indexed for PolicyTau), states from
// the transition kernel. Each interval's reward is revealed at the
// interval's final step. The episode stops at `horizon` steps or when a
// zero-reward absorbing state begins an interval. Deterministic given the
// seed.
//
// A final interval cut short by the horizon pays the reward of its
// truncated segment when the reward kind defines one; otherwise it pays 0
// and the trace is flagged (`reward_defined = false` on the interval and
// `truncated_mid_interval` on the trace).
EpisodeTrace sample_episode(const DrmdpSpec& spec, const PolicyS& policy,
                            std::uint64_t rng_seed, std::int32_t horizon);

EpisodeTrace sample_episode(const DrmdpSpec& spec, const PolicyTau& policy,
                            std::uint64_t rng_seed, std::int32_t horizon);

}  // namespace drlab
