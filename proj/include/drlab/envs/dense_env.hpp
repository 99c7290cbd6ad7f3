#pragma once

#include <cstdint>
#include <vector>

#include "drlab/core/rng.hpp"

namespace drlab {

// Minimal interface for an environment that pays a reward on every step.
// The delayed-reward wrapper converts any such environment into a stream
// with interval-end reward emissions.
class DenseEnv {
 public:
  virtual ~DenseEnv() = default;

  virtual std::int32_t state_dim() const = 0;
  virtual std::int32_t action_dim() const = 0;

  // Starts a new episode and returns the initial state features.
  virtual std::vector<double> reset(Rng& rng) = 0;

  struct StepResult {
    std::vector<double> state;  // successor features
    double reward = 0.0;        // per-step reward of the step just taken
    bool done = false;
  };
  virtual StepResult step(const std::vector<double>& action) = 0;
};

}  // namespace drlab
