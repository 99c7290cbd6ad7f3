#pragma once

#include <cstdint>
#include <vector>

namespace drlab {

// One trajectory step in feature space: state features, action features,
// and whether the slot is pre-episode padding (padding slots carry no
// information and are skipped by additive history structures, masked out
// by fixed-layout ones).
struct StepFeatures {
  std::vector<double> state;
  std::vector<double> action;
  bool padding = false;
};

// A trajectory segment in feature space, mirroring TrajectorySegment:
// slots [0, prefix_len) are the overlap context (realized steps or
// padding), the rest are the current interval's steps, ending with the
// most recent action.
struct SegmentFeatures {
  std::vector<StepFeatures> steps;
  std::int32_t prefix_len = 0;

  std::int32_t total_len() const { return static_cast<std::int32_t>(steps.size()); }
  std::int32_t current_len() const { return total_len() - prefix_len; }
  const StepFeatures& last() const { return steps.back(); }
};

// One stored transition of the replay stream. The segment covers the
// overlap context plus every step of the current interval up to and
// including the one this record describes; `reward` is the delayed
// signal paid at this step (zero except at interval ends).
struct ReplayRecord {
  SegmentFeatures segment;
  double reward = 0.0;
  bool interval_end = false;
  std::vector<double> next_state;  // features of the successor state
  bool next_terminal = false;      // successor ends the episode (target value 0)
  std::int32_t phase = 0;          // step index within the interval
  std::int64_t behavior_id = 0;    // which policy version acted
  std::int64_t episode_id = 0;
  std::int64_t step_index = 0;     // env step at which the record was taken
};

}  // namespace drlab
