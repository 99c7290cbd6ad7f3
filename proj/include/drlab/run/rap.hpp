#pragma once

#include <vector>

namespace drlab {

// Relative average performance: the mean over tasks of the episodic
// return normalized by a dense-reward oracle's return on the same task,
//
//   mean_i (returns[i] + o_i) / (oracle_returns[i] + o_i),
//
// where o_i is `offset` (default 50) on tasks flagged in `offset_task`
// and 0 elsewhere — the flag accommodates tasks whose raw returns sit
// near zero. Throws std::invalid_argument on mismatched or empty inputs
// and when any denominator is zero.
double relative_average_performance(const std::vector<double>& returns,
                                    const std::vector<double>& oracle_returns,
                                    const std::vector<bool>& offset_task,
                                    double offset = 50.0);

}  // namespace drlab
