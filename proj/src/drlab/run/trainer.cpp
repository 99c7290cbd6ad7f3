#include "drlab/run/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "drlab/approx/hc.hpp"
#include "drlab/approx/mlp.hpp"
#include "drlab/approx/records.hpp"
#include "drlab/approx/snapshot.hpp"
#include "drlab/core/rng.hpp"
#include "drlab/envs/point_reach.hpp"
#include "drlab/run/replay_buffer.hpp"

namespace drlab {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void ensure_finite(double value, const char* what, std::int64_t env_step) {
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "training diverged: " << what << " = " << value << " at env step " << env_step;
    throw std::runtime_error(msg.str());
  }
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Mean of the values added since the last reset; NaN while empty.
struct RunningMean {
  double sum = 0.0;
  std::int64_t count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  double value() const { return count > 0 ? sum / static_cast<double>(count) : kNan; }
  void reset() {
    sum = 0.0;
    count = 0;
  }
};

struct EvalStats {
  double return_mean = 0.0;
  double steps_median = 0.0;
};

// Greedy rollouts on a fresh environment: mean action, no exploration
// noise. Deterministic, so it consumes no random numbers.
EvalStats evaluate_policy(const RunConfig& config, const Actor& actor, bool phase_blind) {
  std::vector<double> returns;
  std::vector<double> steps;
  for (std::int32_t episode = 0; episode < config.eval_episodes; ++episode) {
    PointReachEnv env(config.task);
    env.reset();
    double episode_return = 0.0;
    bool reached = false;
    while (!env.done()) {
      const std::vector<double> state = env.features(env.position());
      const double phase_norm =
          phase_blind ? 0.0
                      : static_cast<double>(env.phase()) /
                            static_cast<double>(config.task.interval_len);
      const std::vector<double> action = actor.act(state, phase_norm);
      const PointReachStep out = env.step({action[0], action[1]});
      episode_return += out.reward;
      reached = out.reached;
    }
    returns.push_back(episode_return);
    steps.push_back(reached ? static_cast<double>(env.steps_taken())
                            : static_cast<double>(config.task.step_limit));
  }
  EvalStats stats;
  for (const double r : returns) stats.return_mean += r;
  stats.return_mean /= static_cast<double>(returns.size());
  stats.steps_median = median_of(steps);
  return stats;
}

class MetricsWriter {
 public:
  explicit MetricsWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("metrics: cannot write " + path);
    out_.precision(17);
    out_ << kMetricsHeader << '\n';
  }

  void row(std::int64_t env_step, double return_mean, double steps_median, double td,
           double reg, double hc_var, double mono_var) {
    out_ << env_step << ',' << return_mean << ',' << steps_median << ',' << td << ',' << reg
         << ',' << hc_var << ',' << mono_var << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

std::string format_double(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

std::map<std::string, std::string> parse_arch(const std::string& arch) {
  std::map<std::string, std::string> kv;
  std::istringstream tokens(arch);
  std::string token;
  while (tokens >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("snapshot: malformed architecture token '" + token + "'");
    }
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

const std::string& arch_field(const std::map<std::string, std::string>& kv,
                              const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw std::runtime_error("snapshot: missing architecture field " + key);
  return it->second;
}

const SnapshotSection& find_section(const std::vector<SnapshotSection>& sections,
                                    const std::string& name) {
  for (const SnapshotSection& section : sections) {
    if (section.name == name) return section;
  }
  throw std::runtime_error("snapshot: no '" + name + "' section");
}

// Uniform exploration-noise draw in [-scale, scale] per component.
std::array<double, 2> noisy_action(const std::vector<double>& mean, double scale, Rng& rng) {
  std::array<double, 2> action{};
  for (std::size_t d = 0; d < 2; ++d) {
    action[d] = std::clamp(mean[d] + scale * rng.uniform(-1.0, 1.0), -1.0, 1.0);
  }
  return action;
}

// Ordinary state-action critic: squared TD error with the guidance
// reward stored on every record and the live policy's next action.
LossResult plain_td_loss(const Mlp& critic, const Mlp& critic_target, const Actor& actor,
                         const std::vector<ReplayRecord>& batch, double gamma) {
  if (batch.empty()) throw std::invalid_argument("td loss: empty batch");
  LossResult result;
  result.grad.assign(static_cast<std::size_t>(critic.parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const ReplayRecord& record : batch) {
    std::vector<double> input = record.segment.last().state;
    const std::vector<double>& action = record.segment.last().action;
    input.insert(input.end(), action.begin(), action.end());
    const double pred = critic.forward_scalar(input);

    double y = record.reward;
    if (!record.next_terminal) {
      const std::vector<double> next_action = actor.act(record.next_state, 0.0);
      std::vector<double> next_input = record.next_state;
      next_input.insert(next_input.end(), next_action.begin(), next_action.end());
      y += gamma * critic_target.forward_scalar(next_input);
    }

    const double delta = pred - y;
    result.loss += delta * delta * inv_m;
    const Mlp::Backprop bp = critic.backward(input, {2.0 * delta * inv_m});
    for (std::size_t i = 0; i < result.grad.size(); ++i) result.grad[i] += bp.wrt_params[i];
  }
  result.td = result.loss;
  return result;
}

// Ascent gradient of the batch-mean critic value at the policy's own
// (phase-blind) action.
std::vector<double> plain_policy_gradient(const Mlp& critic, const Actor& actor,
                                          const std::vector<ReplayRecord>& batch) {
  if (batch.empty()) throw std::invalid_argument("policy gradient: empty batch");
  std::vector<double> grad(static_cast<std::size_t>(actor.net().parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const ReplayRecord& record : batch) {
    const std::vector<double>& state = record.segment.last().state;
    std::vector<double> actor_in = state;
    actor_in.push_back(0.0);
    const std::vector<double> action = actor.net().forward(actor_in);
    std::vector<double> input = state;
    input.insert(input.end(), action.begin(), action.end());
    const Mlp::Backprop bp = critic.backward(input, {inv_m});
    std::vector<double> action_seed(action.size());
    for (std::size_t d = 0; d < action.size(); ++d) {
      action_seed[d] = bp.wrt_input[state.size() + d];
    }
    const std::vector<double> sample = actor.net().backward(actor_in, action_seed).wrt_params;
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += sample[i];
  }
  return grad;
}

std::string seed_path(const RunConfig& config, const char* stem, std::int32_t seed,
                      const char* ext) {
  return config.output_directory + "/" + stem + std::to_string(seed) + ext;
}

std::string meta_arch(const RunConfig& config, const char* algo) {
  std::ostringstream s;
  s << "task=point_reach grid=" << format_double(config.task.grid_size)
    << " interval=" << config.task.interval_len << " limit=" << config.task.step_limit
    << " gamma=" << format_double(config.gamma) << " algo=" << algo;
  return s.str();
}

}  // namespace

const char* train_algo_name(TrainAlgo algo) {
  switch (algo) {
    case TrainAlgo::HcDecomposition:
      return "hc";
    case TrainAlgo::IntervalRedistribution:
      return "ircr";
  }
  throw std::invalid_argument("unknown training algorithm");
}

double TrainOutcome::best_steps_to_target_median() const {
  double best = std::numeric_limits<double>::infinity();
  for (const EvalPoint& point : evals) {
    best = std::min(best, point.steps_to_target_median);
  }
  return best;
}

double TrainOutcome::final_steps_to_target_median() const {
  return evals.empty() ? std::numeric_limits<double>::infinity()
                       : evals.back().steps_to_target_median;
}

TrainOutcome train_hc(const RunConfig& config, std::int32_t seed) {
  config.validate();
  std::filesystem::create_directories(config.output_directory);

  Rng root(static_cast<std::uint64_t>(seed));
  Rng rng_init = root.fork();
  Rng rng_act = root.fork();
  Rng rng_sample = root.fork();
  Rng rng_probe = root.fork();

  const std::int32_t interval_len = config.task.interval_len;
  HcConfig critic_config;
  critic_config.kind = config.critic_kind;
  critic_config.pair_span = config.pair_span;
  critic_config.state_dim = 2;
  critic_config.action_dim = 2;
  critic_config.width = config.width;
  critic_config.depth = config.depth;
  critic_config.max_interval_len = interval_len;
  critic_config.overlap = 0;
  critic_config.lambda = config.lambda;

  HcCritic critic(critic_config, rng_init);
  Actor actor(2, 2, config.width, config.depth, rng_init);
  Adam critic_opt(static_cast<std::size_t>(critic.parameter_count()), config.learning_rate);
  Adam actor_opt(static_cast<std::size_t>(actor.net().parameter_count()),
                 config.learning_rate);

  const bool probing = config.probe_every > 0 && config.gradient_steps_per_env_step > 0;
  std::optional<HcCritic> probe_hc;
  std::optional<MonolithicCritic> probe_mono;
  std::optional<Adam> probe_hc_opt;
  std::optional<Adam> probe_mono_opt;
  if (probing) {
    probe_hc.emplace(critic_config, rng_init);
    probe_mono.emplace(0, interval_len, 2, 2, config.width, config.depth, rng_init);
    probe_hc_opt.emplace(static_cast<std::size_t>(probe_hc->parameter_count()),
                         config.learning_rate);
    probe_mono_opt.emplace(static_cast<std::size_t>(probe_mono->net().parameter_count()),
                          config.learning_rate);
  }

  ReplayBuffer buffer(config.buffer_capacity);

  TrainOutcome outcome;
  outcome.algo = TrainAlgo::HcDecomposition;
  outcome.seed = seed;
  outcome.metrics_path = seed_path(config, "hc_metrics_seed", seed, ".csv");
  outcome.snapshot_path = seed_path(config, "hc_snapshot_seed", seed, ".txt");
  MetricsWriter metrics(outcome.metrics_path);

  PointReachEnv env(config.task);
  env.reset();
  std::vector<StepFeatures> interval_steps;
  std::int64_t episode_id = 0;
  std::int64_t behavior_id = 0;

  RunningMean td_window, reg_window, hc_var_window, mono_var_window;
  RunningMean hc_var_total, mono_var_total;

  for (std::int64_t t = 1; t <= config.env_steps; ++t) {
    if (env.done()) {
      env.reset();
      interval_steps.clear();
      ++episode_id;
    }
    const std::vector<double> state = env.features(env.position());
    const std::int32_t phase = env.phase();

    std::array<double, 2> action{};
    if (t <= config.warmup_steps) {
      action = {rng_act.uniform(-1.0, 1.0), rng_act.uniform(-1.0, 1.0)};
    } else {
      const std::vector<double> mean_action = actor.act(
          state, static_cast<double>(phase) / static_cast<double>(interval_len));
      action = noisy_action(mean_action, config.exploration_noise, rng_act);
    }

    const PointReachStep out = env.step(action);

    interval_steps.push_back({state, {action[0], action[1]}, false});
    ReplayRecord record;
    record.segment.steps = interval_steps;
    record.segment.prefix_len = 0;
    record.reward = out.reward;
    record.interval_end = out.interval_end;
    record.next_state = env.features(out.position);
    record.next_terminal = out.reached;  // the step limit truncates, it does not terminate
    record.phase = out.phase;
    record.behavior_id = behavior_id;
    record.episode_id = episode_id;
    record.step_index = t;
    buffer.add(std::move(record));
    if (out.interval_end) interval_steps.clear();

    if (config.gradient_steps_per_env_step > 0 && t > config.warmup_steps &&
        buffer.size() >= config.batch_size) {
      for (std::int32_t g = 0; g < config.gradient_steps_per_env_step; ++g) {
        const std::vector<ReplayRecord> batch = buffer.sample(config.batch_size, rng_sample);

        const LossResult critic_loss = hc_td_loss(critic, batch, actor, config.gamma);
        ensure_finite(critic_loss.loss, "decomposed-critic loss", t);
        {
          std::vector<double> params = critic.parameters();
          critic_opt.step(params, critic_loss.grad);
          critic.set_parameters(params);
        }
        td_window.add(critic_loss.td);
        if (config.lambda > 0.0) reg_window.add(critic_loss.reg);

        std::vector<double> ascent = hc_policy_gradient(critic, batch, actor);
        for (double& g_i : ascent) g_i = -g_i;
        actor_opt.step(actor.net().parameters(), ascent);
        ++behavior_id;
        ++outcome.policy_updates;

        critic.soft_update_targets(config.target_tau);

        if (probing) {
          const LossResult probe_loss = hc_td_loss(*probe_hc, batch, actor, config.gamma);
          ensure_finite(probe_loss.loss, "probe decomposed-critic loss", t);
          {
            std::vector<double> params = probe_hc->parameters();
            probe_hc_opt->step(params, probe_loss.grad);
            probe_hc->set_parameters(params);
          }
          probe_hc->soft_update_targets(config.target_tau);

          const LossResult mono_loss =
              monolithic_td_loss(*probe_mono, batch, actor, config.gamma);
          ensure_finite(mono_loss.loss, "probe whole-segment-critic loss", t);
          probe_mono_opt->step(probe_mono->net().parameters(), mono_loss.grad);
          probe_mono->soft_update_targets(config.target_tau);

          if (outcome.policy_updates % config.probe_every == 0) {
            const std::vector<ReplayRecord> probe_batch =
                buffer.sample(config.probe_batch, rng_probe);
            GradientVarianceProbe probe;
            probe.hc = &*probe_hc;
            probe.monolithic = &*probe_mono;
            probe.actor = &actor;
            probe.batch = probe_batch;
            const VarianceReport report = estimate_gradient_variance(probe);
            hc_var_window.add(report.hc_variance);
            mono_var_window.add(report.monolithic_variance);
            hc_var_total.add(report.hc_variance);
            mono_var_total.add(report.monolithic_variance);
          }
        }
      }
    }

    if (t % config.eval_every == 0 || t == config.env_steps) {
      const EvalStats stats = evaluate_policy(config, actor, /*phase_blind=*/false);
      metrics.row(t, stats.return_mean, stats.steps_median, td_window.value(),
                  reg_window.value(), hc_var_window.value(), mono_var_window.value());
      outcome.evals.push_back({t, stats.return_mean, stats.steps_median});
      td_window.reset();
      reg_window.reset();
      hc_var_window.reset();
      mono_var_window.reset();
    }
  }

  outcome.mean_hc_grad_var = hc_var_total.value();
  outcome.mean_mono_grad_var = mono_var_total.value();

  std::vector<SnapshotSection> sections;
  sections.push_back({"meta", meta_arch(config, "hc"), {}});
  {
    std::ostringstream arch;
    arch << "state=2 action=2 width=" << config.width << " depth=" << config.depth;
    sections.push_back({"actor", arch.str(), actor.net().parameters()});
  }
  {
    std::ostringstream arch;
    arch << "kind=" << (config.critic_kind == HKind::Singleton ? "singleton" : "pairwise")
         << " span=" << (config.critic_kind == HKind::Singleton ? 0 : config.pair_span)
         << " step=4 width=" << config.width << " depth=" << config.depth;
    sections.push_back({"h", arch.str(), critic.h().parameters()});
  }
  {
    std::ostringstream arch;
    arch << "input=5 width=" << config.width << " depth=" << config.depth
         << " max_n=" << interval_len << " overlap=0 lambda=" << format_double(config.lambda);
    sections.push_back({"c", arch.str(), critic.c().parameters()});
  }
  save_snapshot(outcome.snapshot_path, sections);
  return outcome;
}

TrainOutcome train_ircr(const RunConfig& config, std::int32_t seed) {
  config.validate();
  std::filesystem::create_directories(config.output_directory);

  Rng root(static_cast<std::uint64_t>(seed));
  Rng rng_init = root.fork();
  Rng rng_act = root.fork();
  Rng rng_sample = root.fork();

  MlpSpec critic_spec;
  critic_spec.input_dim = 4;  // state then action
  critic_spec.output_dim = 1;
  critic_spec.hidden.assign(static_cast<std::size_t>(std::max(config.depth, 0)),
                            config.width);
  Mlp critic(critic_spec, rng_init);
  Mlp critic_target = critic;
  Actor actor(2, 2, config.width, config.depth, rng_init);
  Adam critic_opt(static_cast<std::size_t>(critic.parameter_count()), config.learning_rate);
  Adam actor_opt(static_cast<std::size_t>(actor.net().parameter_count()),
                 config.learning_rate);

  ReplayBuffer buffer(config.buffer_capacity);

  TrainOutcome outcome;
  outcome.algo = TrainAlgo::IntervalRedistribution;
  outcome.seed = seed;
  outcome.metrics_path = seed_path(config, "ircr_metrics_seed", seed, ".csv");
  outcome.snapshot_path = seed_path(config, "ircr_snapshot_seed", seed, ".txt");
  outcome.mean_hc_grad_var = kNan;
  outcome.mean_mono_grad_var = kNan;
  MetricsWriter metrics(outcome.metrics_path);

  PointReachEnv env(config.task);
  env.reset();
  std::vector<ReplayRecord> pending;  // current interval, reward backfilled at its end
  std::int64_t episode_id = 0;
  std::int64_t behavior_id = 0;
  RunningMean td_window;

  for (std::int64_t t = 1; t <= config.env_steps; ++t) {
    if (env.done()) {
      env.reset();
      ++episode_id;
    }
    const std::vector<double> state = env.features(env.position());

    std::array<double, 2> action{};
    if (t <= config.warmup_steps) {
      action = {rng_act.uniform(-1.0, 1.0), rng_act.uniform(-1.0, 1.0)};
    } else {
      action = noisy_action(actor.act(state, 0.0), config.exploration_noise, rng_act);
    }

    const PointReachStep out = env.step(action);

    ReplayRecord record;
    record.segment.steps = {{state, {action[0], action[1]}, false}};
    record.segment.prefix_len = 0;
    record.reward = 0.0;  // guidance reward filled in at the interval's end
    record.interval_end = true;
    record.next_state = env.features(out.position);
    record.next_terminal = out.reached;
    record.phase = 0;
    record.behavior_id = behavior_id;
    record.episode_id = episode_id;
    record.step_index = t;
    pending.push_back(std::move(record));
    if (out.interval_end) {
      for (ReplayRecord& queued : pending) {
        queued.reward = out.reward;
        buffer.add(std::move(queued));
      }
      pending.clear();
    }

    if (config.gradient_steps_per_env_step > 0 && t > config.warmup_steps &&
        buffer.size() >= config.batch_size) {
      for (std::int32_t g = 0; g < config.gradient_steps_per_env_step; ++g) {
        const std::vector<ReplayRecord> batch = buffer.sample(config.batch_size, rng_sample);

        const LossResult critic_loss =
            plain_td_loss(critic, critic_target, actor, batch, config.gamma);
        ensure_finite(critic_loss.loss, "state-action-critic loss", t);
        critic_opt.step(critic.parameters(), critic_loss.grad);
        td_window.add(critic_loss.td);

        std::vector<double> ascent = plain_policy_gradient(critic, actor, batch);
        for (double& g_i : ascent) g_i = -g_i;
        actor_opt.step(actor.net().parameters(), ascent);
        ++behavior_id;
        ++outcome.policy_updates;

        {  // soft-update the critic target
          const std::vector<double>& live = critic.parameters();
          std::vector<double>& target = critic_target.parameters();
          for (std::size_t i = 0; i < target.size(); ++i) {
            target[i] = config.target_tau * live[i] + (1.0 - config.target_tau) * target[i];
          }
        }
      }
    }

    if (t % config.eval_every == 0 || t == config.env_steps) {
      const EvalStats stats = evaluate_policy(config, actor, /*phase_blind=*/true);
      metrics.row(t, stats.return_mean, stats.steps_median, td_window.value(), kNan, kNan,
                  kNan);
      outcome.evals.push_back({t, stats.return_mean, stats.steps_median});
      td_window.reset();
    }
  }

  std::vector<SnapshotSection> sections;
  sections.push_back({"meta", meta_arch(config, "ircr"), {}});
  {
    std::ostringstream arch;
    arch << "state=2 action=2 width=" << config.width << " depth=" << config.depth;
    sections.push_back({"actor", arch.str(), actor.net().parameters()});
  }
  {
    std::ostringstream arch;
    arch << "input=4 width=" << config.width << " depth=" << config.depth;
    sections.push_back({"critic", arch.str(), critic.parameters()});
  }
  save_snapshot(outcome.snapshot_path, sections);
  return outcome;
}

TrainOutcome train(const RunConfig& config, std::int32_t seed) {
  return config.algo == TrainAlgo::HcDecomposition ? train_hc(config, seed)
                                                   : train_ircr(config, seed);
}

Heatmap heatmap_from_snapshot(const std::string& snapshot_path) {
  const std::vector<SnapshotSection> sections = load_snapshot(snapshot_path);
  const SnapshotSection& meta = find_section(sections, "meta");
  const SnapshotSection& h_section = find_section(sections, "h");
  const SnapshotSection& actor_section = find_section(sections, "actor");

  const auto meta_kv = parse_arch(meta.arch);
  PointReachConfig task;
  task.grid_size = std::stod(arch_field(meta_kv, "grid"));
  task.interval_len = std::stoi(arch_field(meta_kv, "interval"));
  task.step_limit = std::stoi(arch_field(meta_kv, "limit"));

  const auto h_kv = parse_arch(h_section.arch);
  const std::string& kind_name = arch_field(h_kv, "kind");
  if (kind_name != "singleton" && kind_name != "pairwise") {
    throw std::runtime_error("snapshot: unknown history kind " + kind_name);
  }
  Rng scratch(0);
  HStructure h(kind_name == "singleton" ? HKind::Singleton : HKind::PairwiseK,
               std::stoi(arch_field(h_kv, "span")), std::stoi(arch_field(h_kv, "step")),
               std::stoi(arch_field(h_kv, "width")), std::stoi(arch_field(h_kv, "depth")),
               scratch);
  if (h.parameter_count() != static_cast<std::int64_t>(h_section.values.size())) {
    throw std::runtime_error("snapshot: history parameter count mismatch");
  }
  h.set_parameters(h_section.values);

  const auto actor_kv = parse_arch(actor_section.arch);
  Actor actor(std::stoi(arch_field(actor_kv, "state")),
              std::stoi(arch_field(actor_kv, "action")),
              std::stoi(arch_field(actor_kv, "width")),
              std::stoi(arch_field(actor_kv, "depth")), scratch);
  if (actor.net().parameter_count() !=
      static_cast<std::int64_t>(actor_section.values.size())) {
    throw std::runtime_error("snapshot: policy parameter count mismatch");
  }
  actor.net().parameters() = actor_section.values;

  return export_heatmap(h, task, actor);
}

}  // namespace drlab
