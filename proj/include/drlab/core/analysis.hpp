#pragma once

#include <optional>
#include <string>

#include "drlab/core/policy.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// Discounted return of a realized episode:
//   R(tau, n) = sum_i gamma^{t_{i+1} - 1} * r_i,
// i.e. each interval's reward lands at the last step of its interval.
double discounted_return(const EpisodeTrace& trace, double gamma);

// Interval reward r applied to a complete segment (prefix + n interval
// steps with n in the interval law's support). Throws std::invalid_argument
// on an unsupported length and std::out_of_range on a missing Tabulated
// entry.
double evaluate_reward(const DrmdpSpec& spec, const TrajectorySegment& segment);

// True when an episode about to begin an interval in `state`, carrying
// `prefix` as its overlap context, can contribute no further reward: the
// state is a zero-reward sink and the overlap window brings no reward
// mass of its own (with overlap, the first sink interval's reward window
// still reads the pre-sink steps). Episode enumeration and sampling stop
// exactly where this holds.
bool interval_start_terminates(const DrmdpSpec& spec, StateId state,
                               const std::vector<Step>& prefix);

// Same evaluation without the length restriction, for intervals cut short
// by a horizon. Returns nullopt when the reward kind does not define a
// value for the truncated segment (Tabulated without an entry).
std::optional<double> evaluate_reward_truncated(const DrmdpSpec& spec,
                                                const TrajectorySegment& segment);

// Result of a past-invariance check. When the condition fails, the witness
// holds the two pasts and two continuations whose reward comparison flips.
struct PiWitness {
  TrajectorySegment past1, past2;
  std::vector<Step> cont1, cont2;
  double r11 = 0, r12 = 0, r21 = 0, r22 = 0;  // r(past_i o cont_j)
  std::string describe(const DrmdpSpec& spec) const;
};

struct PiReport {
  bool holds = true;
  std::optional<PiWitness> witness;
  std::int64_t comparisons = 0;
};

// Exhaustively verifies the past-invariance condition: for any two equally
// long feasible pasts and any jointly feasible pair of continuations that
// complete an interval,
//   r(p1 o c1) > r(p1 o c2)  <=>  r(p2 o c1) > r(p2 o c2),
// with |delta| <= 1e-12 treated as a tie on either side (a tie on one side
// must be a tie on the other). `max_len` caps the total segment length
// enumerated; `cap` bounds the number of enumerated segments (throws
// std::length_error when exceeded).
PiReport check_pi_condition(const DrmdpSpec& spec, std::int32_t max_len,
                            std::int64_t cap = 2'000'000);

// Strong form: the reward *differences* must match across pasts within
// 1e-9, not just their ordering.
PiReport check_strong_pi_condition(const DrmdpSpec& spec, std::int32_t max_len,
                                   std::int64_t cap = 2'000'000);

}  // namespace drlab
