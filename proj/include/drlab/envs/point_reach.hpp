#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace drlab {

// Square arena of side L with a point agent. The agent starts in the
// bottom-left corner and moves by a velocity action in [-1, 1]^2; the
// target is an (L/10) x (L/10) square adjacent to the middle of the
// right edge. The arena is split into ten vertical bands of width L/10
// whose band reward grows left to right (band i pays i), and the reward
// stream is delayed: every `interval_len` steps the agent receives the
// maximal band reward among the positions it acted from during the
// interval, plus 0 if it entered the target during the interval and -10
// if it did not. The episode ends on target entry or after `step_limit`
// steps; an interval cut short by the end of the episode pays the same
// formula over its realized steps.
struct PointReachConfig {
  double grid_size = 20.0;        // L
  std::int32_t interval_len = 8;  // n
  std::int32_t step_limit = 120;

  // Desk-scale default: minutes-scale training on one core.
  static PointReachConfig desk() { return {20.0, 8, 120}; }
  // Full-scale variant (side 100, interval 20, limit 500).
  static PointReachConfig full() { return {100.0, 20, 500}; }
};

struct PointReachStep {
  std::array<double, 2> position{};  // after the move
  double reward = 0.0;               // zero except when interval_end
  bool interval_end = false;
  bool done = false;
  bool reached = false;         // the move entered the target area
  std::int32_t phase = 0;       // phase of the step just taken
  bool action_clipped = false;  // some component lay outside [-1, 1]
};

class PointReachEnv {
 public:
  explicit PointReachEnv(const PointReachConfig& config);

  const PointReachConfig& config() const { return config_; }
  std::int32_t state_dim() const { return 2; }
  std::int32_t action_dim() const { return 2; }

  // Starts a new episode at the bottom-left corner.
  std::array<double, 2> reset();
  // Applies one velocity action (components clamped to [-1, 1], the
  // position clamped to the arena). Throws std::logic_error once done.
  PointReachStep step(std::array<double, 2> action);

  std::array<double, 2> position() const { return position_; }
  std::int32_t steps_taken() const { return steps_; }
  bool done() const { return done_; }
  // Phase the next step will have (0 right after reset or an interval end).
  std::int32_t phase() const { return phase_; }

  // Vertical band index of an x-coordinate, 0..9 left to right.
  std::int32_t band(double x) const;
  bool in_target(std::array<double, 2> p) const;
  // Feature encoding for approximators: coordinates scaled to [0, 1].
  std::vector<double> features(std::array<double, 2> p) const;

 private:
  PointReachConfig config_;
  std::array<double, 2> position_{};
  std::int32_t steps_ = 0;
  std::int32_t phase_ = 0;
  std::int32_t band_max_ = 0;
  bool done_ = true;
};

// Step count of the best policy: straight-line distance from the start
// to the nearest point of the target area at unit speed, rounded up.
std::int32_t shortest_path_steps(const PointReachConfig& config);

// One recorded step of an episode, exportable as CSV with the fixed
// header "t,x,y,a_x,a_y,phase,R_t,done". The position is the state the
// agent acted from; the clipped flag stays out of the CSV.
struct TraceRow {
  std::int32_t t = 0;
  double x = 0.0, y = 0.0;
  double action_x = 0.0, action_y = 0.0;
  std::int32_t phase = 0;
  double reward = 0.0;
  bool done = false;
  bool action_clipped = false;
};

struct RolloutTrace {
  std::vector<TraceRow> rows;
  std::int32_t clipped_steps = 0;

  std::string to_csv() const;
};

}  // namespace drlab
