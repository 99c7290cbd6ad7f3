#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/core/policy.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/tabular/qtable.hpp"

namespace drlab {

// Fixed point of the naive per-step critic update on delayed-reward data:
// Q(s,a) tracks the average, over occurrences of (s,a) in the data
// distribution of `policy`, of the stored target R_t + gamma * V(next),
// where R_t is the interval reward paid at the step (zero except at
// interval ends) and V(next) bootstraps through the policy at the next
// state's phase. Occurrence weights are the exact visitation
// probabilities of the policy's episode distribution; for (s,a) pairs the
// policy itself never reaches, the average is taken over the
// minimal-exploration occurrences (histories reachable with the fewest
// forced off-policy actions, each forced choice weighted uniformly),
// matching the epsilon -> 0 limit of an epsilon-greedy data
// distribution. Entries unreachable within the exploration budget are
// left undefined. Requires an episodic spec: every branch must end
// within `horizon_cap` steps.
StateQTable vanilla_q_fixed_point(const DrmdpSpec& spec, const PolicyS& policy,
                                  double tol = 1e-12, std::int32_t max_iters = 100'000,
                                  std::int32_t horizon_cap = 10'000);

// Greedy per-state improvement on a state-action critic, applied to every
// phase row alike (the critic carries no phase information). Undefined
// entries count as -infinity; a state with no defined entry keeps
// action 0. Ties resolve to the lowest action id.
PolicyS greedy_improve_state_q(const DrmdpSpec& spec, const StateQTable& q);

struct VanillaIterationResult {
  std::vector<PolicyS> policies;
  std::vector<double> returns;  // exact expected discounted return per iterate
  bool converged = false;
};

// Alternates vanilla_q_fixed_point and greedy_improve_state_q, recording
// the exact return of every iterate. Stops when the policy repeats.
VanillaIterationResult vanilla_iteration(const DrmdpSpec& spec, const PolicyS& initial,
                                         std::int32_t max_rounds = 50);

// Expected value of the per-step critic target at one state-action pair
// under a mixture of behavior policies, when the critic conditions only
// on (s,a): the mixture weight of each behavior on the pair's history
// shifts with the behavior's preference for the action itself, so the
// same pair can carry different targets for different actions of the same
// state. One row per queried pair.
struct OffPolicyBiasRow {
  StateId state = 0;
  ActionId action = 0;
  double expected_target = 0.0;
};

struct OffPolicyBiasReport {
  std::vector<OffPolicyBiasRow> rows;
  std::string describe() const;
};

// Computes the expected stored target for every action of `state` at the
// given within-interval position, mixing the listed behavior policies
// with equal episode shares. Only the pre-action reward sum of the
// current interval enters the target (the value-free part of the stored
// return), which isolates how behavior mixing skews the conditioning.
OffPolicyBiasReport off_policy_bias_report(const DrmdpSpec& spec,
                                           const std::vector<PolicyS>& behaviors, StateId state,
                                           std::int32_t position);

// Five-state process exhibiting the mixing skew: two routes reach the
// same decision state with different behavior-dependent frequencies, and
// the behaviors also split on the decision state's actions, so the
// expected target differs across those actions even though the critic
// sees the identical (state, action-independent) history distribution.
DrmdpSpec off_policy_bias_example_spec(double gamma = 0.99);

// The two behavior mixtures for the example: `skewed` routes and decides
// with probability 0.9 / 0.1 across the two behaviors; `uniform` makes
// both behaviors identical (no skew, constant targets).
std::vector<PolicyS> off_policy_bias_example_behaviors(const DrmdpSpec& spec, bool skewed);

}  // namespace drlab
