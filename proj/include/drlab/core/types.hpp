#pragma once

#include <cstdint>
#include <vector>

namespace drlab {

// States and actions are dense integer ids. Actions are indexed per state:
// an action id is only meaningful together with the state it is taken from.
using StateId = std::int32_t;
using ActionId = std::int32_t;

// Sentinel used for the zero-token padding steps that stand in for
// "before episode start" in overlap prefixes.
inline constexpr StateId kPaddingState = -1;
inline constexpr ActionId kPaddingAction = -1;

// One (state, action) pair of a trajectory.
struct Step {
  StateId state = kPaddingState;
  ActionId action = kPaddingAction;

  bool is_padding() const { return state == kPaddingState; }

  friend bool operator==(const Step&, const Step&) = default;
  friend auto operator<=>(const Step&, const Step&) = default;
};

// A contiguous state-action segment covering (up to) one signal interval
// plus the `prefix_len` steps immediately before the interval's start.
//
// Layout of `steps`:
//   [0, prefix_len)        — overlap prefix: either realized steps of the
//                            preceding interval(s) or padding sentinels
//                            when the episode had not started yet;
//   [prefix_len, size())   — steps of the current interval, in order.
//
// When used as a key of the trajectory value table the segment ends with
// the most recent action, i.e. it represents tau_{t_i-c : t+1}.
struct TrajectorySegment {
  std::vector<Step> steps;
  std::int32_t prefix_len = 0;

  std::int32_t total_len() const { return static_cast<std::int32_t>(steps.size()); }
  std::int32_t current_len() const { return total_len() - prefix_len; }

  const Step& last() const { return steps.back(); }

  // Phase (t - t_i) of the segment's final step.
  std::int32_t last_phase() const { return current_len() - 1; }

  friend bool operator==(const TrajectorySegment&, const TrajectorySegment&) = default;
  friend auto operator<=>(const TrajectorySegment&, const TrajectorySegment&) = default;
};

// One completed (or truncated) signal interval of an episode.
struct IntervalRecord {
  TrajectorySegment segment;  // prefix + the interval's own steps
  std::int32_t length = 0;    // realized n_i (non-prefix step count)
  double reward = 0.0;        // realized interval reward
  bool truncated = false;     // cut short by horizon before its sampled length
  bool reward_defined = true; // false when a truncated Tabulated segment had no entry

  friend bool operator==(const IntervalRecord&, const IntervalRecord&) = default;
};

// A realized episode: the sequence of its signal intervals.
// Interval start offsets satisfy t_1 = 0, t_{i+1} = t_i + n_i.
struct EpisodeTrace {
  std::vector<IntervalRecord> intervals;
  bool truncated_mid_interval = false;

  std::int32_t total_steps() const {
    std::int32_t n = 0;
    for (const auto& iv : intervals) n += iv.length;
    return n;
  }

  friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

}  // namespace drlab
