#include "drlab/run/run_config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace drlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t first = 0;
  std::size_t last = s.size();
  while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
  while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) --last;
  return s.substr(first, last - first);
}

[[noreturn]] void fail(std::int32_t line, const std::string& what) {
  throw std::invalid_argument("run config, line " + std::to_string(line) + ": " + what);
}

double parse_double(std::int32_t line, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + value + "'");
  }
  if (used != value.size()) fail(line, "trailing characters after number '" + value + "'");
  return out;
}

std::int64_t parse_int(std::int32_t line, const std::string& value) {
  std::size_t used = 0;
  std::int64_t out = 0;
  try {
    out = std::stoll(value, &used);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + value + "'");
  }
  if (used != value.size()) fail(line, "trailing characters after integer '" + value + "'");
  return out;
}

std::int32_t parse_int32(std::int32_t line, const std::string& value) {
  const std::int64_t out = parse_int(line, value);
  if (out < INT32_MIN || out > INT32_MAX) fail(line, "integer out of range: " + value);
  return static_cast<std::int32_t>(out);
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("run config: ") + what);
  };
  require(task_name == "point_reach", "task name must be point_reach");
  require(task.grid_size > 0.0, "grid_size must be positive");
  require(task.interval_len > 0, "interval_len must be positive");
  require(task.step_limit > 0, "step_limit must be positive");
  require(critic_kind != HKind::PairwiseK || pair_span >= 1, "pair_span must be at least 1");
  require(width > 0, "width must be positive");
  require(depth >= 0, "depth must be non-negative");
  require(lambda >= 0.0, "lambda must be non-negative");
  require(gamma > 0.0 && gamma < 1.0, "gamma must lie in (0, 1)");
  require(env_steps > 0, "env_steps must be positive");
  require(gradient_steps_per_env_step >= 0, "gradient_steps_per_env_step must be non-negative");
  require(batch_size > 0, "batch_size must be positive");
  require(buffer_capacity > 0, "buffer_capacity must be positive");
  require(target_tau > 0.0 && target_tau <= 1.0, "target_tau must lie in (0, 1]");
  require(learning_rate > 0.0, "learning_rate must be positive");
  require(eval_every > 0, "eval_every must be positive");
  require(eval_episodes > 0, "eval_episodes must be positive");
  require(exploration_noise >= 0.0, "exploration_noise must be non-negative");
  require(warmup_steps >= 0, "warmup_steps must be non-negative");
  require(probe_every >= 0, "probe_every must be non-negative");
  require(probe_batch >= 2, "probe_batch must be at least 2");
  require(!output_directory.empty(), "output directory must not be empty");
}

RunConfig parse_run_config(const std::string& text) {
  RunConfig config;
  std::istringstream lines(text);
  std::string raw;
  std::string section;
  std::set<std::string> seen;
  std::int32_t line_no = 0;
  while (std::getline(lines, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "task" && section != "critic" && section != "train" &&
          section != "output") {
        fail(line_no, "unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
    if (section.empty()) fail(line_no, "key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(line_no, "empty key");
    if (value.empty()) fail(line_no, "empty value for '" + key + "'");
    if (!seen.insert(section + "." + key).second) {
      fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
    }

    if (section == "task") {
      if (key == "name") {
        config.task_name = value;
      } else if (key == "grid_size") {
        config.task.grid_size = parse_double(line_no, value);
      } else if (key == "interval_len") {
        config.task.interval_len = parse_int32(line_no, value);
      } else if (key == "step_limit") {
        config.task.step_limit = parse_int32(line_no, value);
      } else {
        fail(line_no, "unknown key '" + key + "' in [task]");
      }
    } else if (section == "critic") {
      if (key == "kind") {
        if (value == "singleton") {
          config.critic_kind = HKind::Singleton;
        } else if (value == "pairwise") {
          config.critic_kind = HKind::PairwiseK;
        } else {
          fail(line_no, "critic kind must be singleton or pairwise");
        }
      } else if (key == "pair_span") {
        config.pair_span = parse_int32(line_no, value);
      } else if (key == "width") {
        config.width = parse_int32(line_no, value);
      } else if (key == "depth") {
        config.depth = parse_int32(line_no, value);
      } else if (key == "lambda") {
        config.lambda = parse_double(line_no, value);
      } else {
        fail(line_no, "unknown key '" + key + "' in [critic]");
      }
    } else if (section == "train") {
      if (key == "algo") {
        if (value == "hc") {
          config.algo = TrainAlgo::HcDecomposition;
        } else if (value == "ircr") {
          config.algo = TrainAlgo::IntervalRedistribution;
        } else {
          fail(line_no, "algo must be hc or ircr, got '" + value + "'");
        }
      } else if (key == "gamma") {
        config.gamma = parse_double(line_no, value);
      } else if (key == "env_steps") {
        config.env_steps = parse_int(line_no, value);
      } else if (key == "gradient_steps_per_env_step") {
        config.gradient_steps_per_env_step = parse_int32(line_no, value);
      } else if (key == "batch_size") {
        config.batch_size = parse_int32(line_no, value);
      } else if (key == "buffer_capacity") {
        config.buffer_capacity = parse_int(line_no, value);
      } else if (key == "target_tau") {
        config.target_tau = parse_double(line_no, value);
      } else if (key == "learning_rate") {
        config.learning_rate = parse_double(line_no, value);
      } else if (key == "eval_every") {
        config.eval_every = parse_int(line_no, value);
      } else if (key == "eval_episodes") {
        config.eval_episodes = parse_int32(line_no, value);
      } else if (key == "exploration_noise") {
        config.exploration_noise = parse_double(line_no, value);
      } else if (key == "warmup_steps") {
        config.warmup_steps = parse_int(line_no, value);
      } else if (key == "probe_every") {
        config.probe_every = parse_int(line_no, value);
      } else if (key == "probe_batch") {
        config.probe_batch = parse_int32(line_no, value);
      } else {
        fail(line_no, "unknown key '" + key + "' in [train]");
      }
    } else {  // output
      if (key == "directory") {
        config.output_directory = value;
      } else {
        fail(line_no, "unknown key '" + key + "' in [output]");
      }
    }
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("run config: cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

}  // namespace drlab
