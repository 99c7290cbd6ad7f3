#include "drlab/envs/point_reach.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drlab {

PointReachEnv::PointReachEnv(const PointReachConfig& config) : config_(config) {
  if (config.grid_size <= 0.0) {
    throw std::invalid_argument("point reach: grid size must be positive");
  }
  if (config.interval_len < 1) {
    throw std::invalid_argument("point reach: interval length must be at least 1");
  }
  if (config.step_limit < 1) {
    throw std::invalid_argument("point reach: step limit must be at least 1");
  }
}

std::array<double, 2> PointReachEnv::reset() {
  position_ = {0.0, 0.0};
  steps_ = 0;
  phase_ = 0;
  band_max_ = 0;
  done_ = false;
  return position_;
}

std::int32_t PointReachEnv::band(double x) const {
  const double width = config_.grid_size / 10.0;
  const auto idx = static_cast<std::int32_t>(std::floor(x / width));
  return std::clamp(idx, 0, 9);
}

bool PointReachEnv::in_target(std::array<double, 2> p) const {
  const double l = config_.grid_size;
  const double half = l / 20.0;  // half the target's side
  return p[0] >= l - l / 10.0 && p[1] >= l / 2.0 - half && p[1] <= l / 2.0 + half;
}

std::vector<double> PointReachEnv::features(std::array<double, 2> p) const {
  return {p[0] / config_.grid_size, p[1] / config_.grid_size};
}

PointReachStep PointReachEnv::step(std::array<double, 2> action) {
  if (done_) throw std::logic_error("point reach: episode already finished");

  // The interval's band credit covers the positions the agent acted from.
  band_max_ = std::max(band_max_, band(position_[0]));

  PointReachStep result;
  result.phase = phase_;
  for (double& a : action) {
    if (a < -1.0 || a > 1.0) {
      result.action_clipped = true;
      a = std::clamp(a, -1.0, 1.0);
    }
  }
  position_[0] = std::clamp(position_[0] + action[0], 0.0, config_.grid_size);
  position_[1] = std::clamp(position_[1] + action[1], 0.0, config_.grid_size);
  ++steps_;

  result.position = position_;
  result.reached = in_target(position_);
  result.done = result.reached || steps_ >= config_.step_limit;
  result.interval_end = phase_ == config_.interval_len - 1 || result.done;
  if (result.interval_end) {
    result.reward = static_cast<double>(band_max_) + (result.reached ? 0.0 : -10.0);
    band_max_ = 0;
    phase_ = 0;
  } else {
    ++phase_;
  }
  done_ = result.done;
  return result;
}

std::int32_t shortest_path_steps(const PointReachConfig& config) {
  const PointReachEnv env(config);
  const std::array<double, 2> start = {0.0, 0.0};
  if (env.in_target(start)) return 0;
  const double l = config.grid_size;
  // The nearest target point from the bottom-left corner is the target
  // area's bottom-left corner.
  const double dx = l - l / 10.0;
  const double dy = l / 2.0 - l / 20.0;
  return static_cast<std::int32_t>(std::ceil(std::hypot(dx, dy)));
}

std::string RolloutTrace::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "t,x,y,a_x,a_y,phase,R_t,done\n";
  for (const TraceRow& row : rows) {
    out << row.t << ',' << row.x << ',' << row.y << ',' << row.action_x << ','
        << row.action_y << ',' << row.phase << ',' << row.reward << ','
        << (row.done ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace drlab
