#pragma once

#include <map>
#include <vector>

#include "drlab/core/types.hpp"

namespace drlab {

// Families of interval reward functionals r(tau_{t_i-c : t_i+n_i}).
//
//  Sum         sum of per-step rewards over the segment's first n_i slots
//              (the overlapped sum r_c: steps [t_i-c, t_i+n_i-c), with
//              per-step reward 0 before episode start; for c = 0 this is
//              the plain within-interval sum);
//  Max         10 * max of per-step rewards over the interval's own steps
//              (defined for c = 0);
//  Square      4 * f(avg per-step reward) with f(x) = x for |x| < 1 and
//              f(x) = sign(x) * x^2 otherwise (defined for c = 0);
//  WeightedSum sum of w_slot * rhat over all slots, weights in [0,1]
//              indexed by position relative to the interval start
//              (slot j holds weight index j - prefix, range [-c, n));
//  Tabulated   explicit map from the full padded segment to a value.
enum class RewardKind { Sum, Max, Square, WeightedSum, Tabulated };

const char* reward_kind_name(RewardKind kind);

struct RewardFunctional {
  RewardKind kind = RewardKind::Sum;

  // Per-step reward table rhat[state][action]; used by every kind except
  // Tabulated. Padding steps contribute rhat = 0.
  std::vector<std::vector<double>> step_reward;

  // WeightedSum only: weights[j] multiplies segment slot j (slot 0 is the
  // oldest prefix slot). Must cover c + max interval length slots.
  std::vector<double> weights;

  // Tabulated only: value per full segment step list (prefix included,
  // padding sentinels as stored).
  std::map<std::vector<Step>, double> table;
};

}  // namespace drlab
