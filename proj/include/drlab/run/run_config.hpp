#pragma once

#include <cstdint>
#include <string>

#include "drlab/approx/hc.hpp"
#include "drlab/envs/point_reach.hpp"

namespace drlab {

// Training run description, readable from a small sectioned text format:
//
//   # comment
//   [task]
//   name = point_reach
//   grid_size = 20
//   interval_len = 8
//   step_limit = 120
//
//   [critic]
//   kind = singleton          # or pairwise
//   pair_span = 1             # pair reach, pairwise only
//   width = 32
//   depth = 1
//   lambda = 0.05
//
//   [train]
//   algo = hc                 # or ircr (redistributed-reward baseline)
//   gamma = 0.99
//   env_steps = 50000
//   gradient_steps_per_env_step = 1
//   batch_size = 64
//   buffer_capacity = 100000
//   target_tau = 0.005
//   learning_rate = 0.0003
//   eval_every = 1000
//   eval_episodes = 1
//   exploration_noise = 0.3
//   warmup_steps = 1000
//   probe_every = 250         # gradient-variance probe cadence, 0 disables
//   probe_batch = 64
//
//   [output]
//   directory = runs/desk
//
// Every key is optional (the values above are the defaults); unknown
// sections, unknown keys, and duplicate keys are errors rather than
// silently ignored.

// Which learner a training run uses.
enum class TrainAlgo {
  HcDecomposition,         // decomposed trajectory critic + additive history
  IntervalRedistribution,  // ordinary state-action critic on redistributed rewards
};

const char* train_algo_name(TrainAlgo algo);

struct RunConfig {
  // [task] — the only supported environment is the delayed-reward arena.
  std::string task_name = "point_reach";
  PointReachConfig task = PointReachConfig::desk();

  // [critic]
  HKind critic_kind = HKind::Singleton;
  std::int32_t pair_span = 1;
  std::int32_t width = 32;
  std::int32_t depth = 1;
  double lambda = 0.05;

  // [train]
  TrainAlgo algo = TrainAlgo::HcDecomposition;
  double gamma = 0.99;
  std::int64_t env_steps = 50'000;
  std::int32_t gradient_steps_per_env_step = 1;  // zero runs rollouts only
  std::int32_t batch_size = 64;
  std::int64_t buffer_capacity = 100'000;
  double target_tau = 0.005;
  double learning_rate = 3e-4;
  std::int64_t eval_every = 1'000;
  std::int32_t eval_episodes = 1;
  double exploration_noise = 0.3;
  std::int64_t warmup_steps = 1'000;
  std::int64_t probe_every = 250;
  std::int32_t probe_batch = 64;

  // [output]
  std::string output_directory = "runs/desk";

  // Throws std::invalid_argument listing the first violated constraint.
  void validate() const;
};

// Parses the sectioned text format above. Throws std::invalid_argument
// with a line number on malformed lines, unknown sections or keys,
// duplicates, and value-range violations.
RunConfig parse_run_config(const std::string& text);

// Reads and parses a config file; std::runtime_error if unreadable.
RunConfig load_run_config(const std::string& path);

}  // namespace drlab
