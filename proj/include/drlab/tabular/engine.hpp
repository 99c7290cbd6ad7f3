#pragma once

#include <cstdint>
#include <vector>

#include "drlab/core/policy.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/tabular/qtable.hpp"

namespace drlab {

// Exact trajectory value of one key under a phase policy, computed by
// direct enumeration of all continuations: branch on the interval hazard
// and on every transition / action choice, accumulating discounted
// interval rewards until a branch's remaining discounted probability mass
// falls below `mass_cutoff`. Throws std::length_error when a branch is
// still above the cutoff after `horizon_cap` further steps (the
// enumeration would be unbounded at the requested accuracy).
double exact_q_value(const DrmdpSpec& spec, const PolicyS& policy, const TrajectorySegment& key,
                     std::int32_t horizon_cap = 10'000, double mass_cutoff = 1e-12);

// Full table of exact_q_value over every feasible key. Independent oracle
// for the fixed-point solver: sums over realized futures directly instead
// of iterating an operator.
TrajectoryQTable exact_q_by_enumeration(const DrmdpSpec& spec, const PolicyS& policy,
                                        std::int32_t horizon_cap = 10'000,
                                        double mass_cutoff = 1e-12,
                                        std::int64_t key_cap = 2'000'000);

// One synchronous application of the trajectory Bellman operator: the
// exact minimizer of the squared TD objective holding `target` fixed,
//   out[key] = (1-h) * gamma * E[target[key + next step]]
//            + h * (r(key) + gamma * E[target[restart + first step]]),
// where h is the hazard of the interval ending at the key's current
// length, the continue expectation draws the next action from the phase
// at the extended step and the restart expectation from phase 0, and the
// restart key keeps the completed interval's last c steps as its prefix.
// Restart states whose overlap window carries no reward mass terminate
// the episode and contribute no bootstrap. Throws std::out_of_range when
// a successor key is missing from `target`.
TrajectoryQTable bellman_sweep(const TrajectoryQTable& target, const PolicyS& policy);

struct FixedPointResult {
  TrajectoryQTable table;
  std::int32_t sweeps = 0;
  double final_residual = 0.0;
};

// Iterates bellman_sweep from the all-zero table until the sup-norm
// change of a sweep falls below `tol` (guaranteed by gamma-contraction).
// Throws std::runtime_error when `max_sweeps` sweeps do not reach it.
FixedPointResult solve_fixed_point(const DrmdpSpec& spec, const PolicyS& policy,
                                   double tol = 1e-12, std::int32_t max_sweeps = 100'000,
                                   std::int64_t key_cap = 2'000'000);

// Expected discounted return recovered from trajectory values: the mean
// over the initial distribution and phase-0 action draws of the value of
// the first step, taken under the episode-start prefix (all padding).
double j_value(const TrajectoryQTable& table, const PolicyS& policy);

// Expected discounted return by direct enumeration of the episode
// distribution, for either policy class. Exact (no iteration) on
// episodic specs whose enumeration is finite; elsewhere truncated at
// `mass_cutoff` like exact_q_value. The history policy must define a row
// for every reachable action point (std::out_of_range otherwise).
double exact_return(const DrmdpSpec& spec, const PolicyS& policy,
                    std::int32_t horizon_cap = 10'000, double mass_cutoff = 1e-12);
double exact_return(const DrmdpSpec& spec, const PolicyTau& policy,
                    std::int32_t horizon_cap = 10'000, double mass_cutoff = 1e-12);

// How ties and unreachable rows were settled during greedy improvement.
struct ImproveReport {
  // (state, phase) rows with no feasible history. Phase > 0 rows copy the
  // state's resolved phase-0 row; an unreachable phase-0 row defaults to
  // action 0.
  std::vector<std::pair<StateId, std::int32_t>> unreachable_rows;
};

// Greedy phase-policy improvement against trajectory values: for every
// (state, phase), pick the action maximizing the value of the canonical
// feasible history ending at that state and phase (the lexicographically
// smallest such history), ties resolved to the lowest action id. Under
// past invariance the canonical choice is immaterial — every feasible
// history yields the same argmax.
PolicyS policy_improve(const TrajectoryQTable& table, ImproveReport* report = nullptr);

struct OrderCheckReport {
  bool holds = true;
  std::int64_t comparisons = 0;
  std::string witness;  // empty unless a violation was found
};

// Verifies that the ordering of values across a (state, phase)'s actions
// does not depend on the history: for every pair of feasible histories
// ending at the same state and phase and every action pair, the signs of
// the value differences agree, with |delta| <= tie_tol treated as a tie
// on both sides. On past-invariant specs this is what makes the greedy
// phase-indexed argmax well-defined.
OrderCheckReport check_order_invariance(const TrajectoryQTable& table, double tie_tol = 1e-12);

struct PolicyIterationResult {
  std::vector<PolicyS> policies;  // iterates, initial policy first
  std::vector<double> returns;    // expected discounted return per iterate
  bool converged = false;         // true when an iterate repeated
};

// Alternates exact evaluation and greedy improvement from `initial` until
// the policy repeats or `max_rounds` improvements have run.
PolicyIterationResult policy_iteration(const DrmdpSpec& spec, const PolicyS& initial,
                                       std::int32_t max_rounds = 50, double tol = 1e-12,
                                       std::int64_t key_cap = 2'000'000);

}  // namespace drlab
