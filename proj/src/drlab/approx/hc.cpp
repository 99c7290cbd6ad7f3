#include "drlab/approx/hc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace drlab {

namespace {

// Light structural validation shared by the batch operations.
void validate_record(const ReplayRecord& record) {
  const SegmentFeatures& seg = record.segment;
  if (seg.total_len() < 1) throw std::invalid_argument("replay record: empty segment");
  if (seg.prefix_len < 0 || seg.current_len() < 1) {
    throw std::invalid_argument("replay record: prefix length inconsistent with segment");
  }
  if (record.phase != seg.current_len() - 1) {
    throw std::invalid_argument("replay record: phase inconsistent with segment layout");
  }
  if (seg.last().padding) {
    throw std::invalid_argument("replay record: current step cannot be padding");
  }
}

std::vector<StepFeatures> history_steps(const SegmentFeatures& segment) {
  return {segment.steps.begin(), segment.steps.end() - 1};
}

// History part of the successor key: the whole segment when the interval
// continues, its last `overlap` steps when a fresh interval starts.
std::vector<StepFeatures> next_history_steps(const SegmentFeatures& segment, bool interval_end,
                                             std::int32_t overlap) {
  if (!interval_end) return segment.steps;
  const auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(overlap, 0)),
                                          segment.steps.size());
  return {segment.steps.end() - static_cast<std::ptrdiff_t>(keep), segment.steps.end()};
}

void blend_into(const std::vector<double>& live, std::vector<double>& target, double tau) {
  for (std::size_t i = 0; i < live.size(); ++i) {
    target[i] = tau * live[i] + (1.0 - tau) * target[i];
  }
}

void check_tau(double tau) {
  if (!(tau > 0.0) || tau > 1.0) {
    throw std::invalid_argument("soft update: smoothing factor must lie in (0, 1]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// HStructure

HStructure::HStructure(HKind kind, std::int32_t pair_span, std::int32_t step_dim,
                       std::int32_t width, std::int32_t depth, Rng& rng)
    : kind_(kind), pair_span_(kind == HKind::Singleton ? 0 : pair_span), step_dim_(step_dim) {
  if (step_dim <= 0) throw std::invalid_argument("history structure: step_dim must be positive");
  if (kind == HKind::PairwiseK && pair_span < 1) {
    throw std::invalid_argument("history structure: pairwise span must be at least 1");
  }
  const std::vector<std::int32_t> hidden(static_cast<std::size_t>(std::max(depth, 0)), width);
  auto make = [&](std::int32_t input_dim) {
    MlpSpec spec;
    spec.input_dim = input_dim;
    spec.hidden = hidden;
    spec.output_dim = 1;
    spec.tanh_output = false;
    return Mlp(spec, rng);
  };
  nets_.push_back(make(step_dim));  // single-step term
  if (kind_ == HKind::PairwiseK) {
    for (std::int32_t k = 1; k <= pair_span_; ++k) nets_.push_back(make(2 * step_dim));
  }
}

std::int64_t HStructure::parameter_count() const {
  std::int64_t total = 0;
  for (const Mlp& net : nets_) total += net.parameter_count();
  return total;
}

std::vector<double> HStructure::parameters() const {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(parameter_count()));
  for (const Mlp& net : nets_) {
    flat.insert(flat.end(), net.parameters().begin(), net.parameters().end());
  }
  return flat;
}

void HStructure::set_parameters(const std::vector<double>& flat) {
  if (static_cast<std::int64_t>(flat.size()) != parameter_count()) {
    throw std::invalid_argument("history structure: parameter vector size mismatch");
  }
  std::size_t offset = 0;
  for (Mlp& net : nets_) {
    const auto n = static_cast<std::size_t>(net.parameter_count());
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(offset),
              flat.begin() + static_cast<std::ptrdiff_t>(offset + n), net.parameters().begin());
    offset += n;
  }
}

std::vector<double> HStructure::step_input(const StepFeatures& step) const {
  std::vector<double> input;
  input.reserve(step.state.size() + step.action.size());
  input.insert(input.end(), step.state.begin(), step.state.end());
  input.insert(input.end(), step.action.begin(), step.action.end());
  if (static_cast<std::int32_t>(input.size()) != step_dim_) {
    throw std::invalid_argument("history structure: step feature size mismatch");
  }
  return input;
}

double HStructure::value(const std::vector<StepFeatures>& steps) const {
  std::vector<const StepFeatures*> real;
  real.reserve(steps.size());
  for (const StepFeatures& step : steps) {
    if (!step.padding) real.push_back(&step);
  }
  double acc = 0.0;
  for (const StepFeatures* step : real) acc += nets_[0].forward_scalar(step_input(*step));
  if (kind_ == HKind::PairwiseK) {
    for (std::int32_t k = 1; k <= pair_span_; ++k) {
      for (std::size_t j = 0; j + static_cast<std::size_t>(k) < real.size(); ++j) {
        std::vector<double> pair = step_input(*real[j]);
        const std::vector<double> right = step_input(*real[j + static_cast<std::size_t>(k)]);
        pair.insert(pair.end(), right.begin(), right.end());
        acc += nets_[static_cast<std::size_t>(k)].forward_scalar(pair);
      }
    }
  }
  return acc;
}

double HStructure::value_backward(const std::vector<StepFeatures>& steps, double seed,
                                  std::vector<double>& grad) const {
  if (static_cast<std::int64_t>(grad.size()) != parameter_count()) {
    throw std::invalid_argument("history structure: gradient buffer size mismatch");
  }
  std::vector<std::size_t> offsets;
  std::size_t running = 0;
  for (const Mlp& net : nets_) {
    offsets.push_back(running);
    running += static_cast<std::size_t>(net.parameter_count());
  }
  std::vector<const StepFeatures*> real;
  real.reserve(steps.size());
  for (const StepFeatures& step : steps) {
    if (!step.padding) real.push_back(&step);
  }
  const std::vector<double> seed_vec{seed};
  auto add_term = [&](std::size_t net_idx, const std::vector<double>& input) {
    const Mlp::Backprop bp = nets_[net_idx].backward(input, seed_vec);
    const std::size_t base = offsets[net_idx];
    for (std::size_t i = 0; i < bp.wrt_params.size(); ++i) grad[base + i] += bp.wrt_params[i];
    return bp.output[0];
  };
  double acc = 0.0;
  for (const StepFeatures* step : real) acc += add_term(0, step_input(*step));
  if (kind_ == HKind::PairwiseK) {
    for (std::int32_t k = 1; k <= pair_span_; ++k) {
      for (std::size_t j = 0; j + static_cast<std::size_t>(k) < real.size(); ++j) {
        std::vector<double> pair = step_input(*real[j]);
        const std::vector<double> right = step_input(*real[j + static_cast<std::size_t>(k)]);
        pair.insert(pair.end(), right.begin(), right.end());
        acc += add_term(static_cast<std::size_t>(k), pair);
      }
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Actor

Actor::Actor(std::int32_t state_dim, std::int32_t action_dim, std::int32_t width,
             std::int32_t depth, Rng& rng)
    : state_dim_(state_dim), action_dim_(action_dim) {
  if (state_dim <= 0 || action_dim <= 0) {
    throw std::invalid_argument("actor: dimensions must be positive");
  }
  MlpSpec spec;
  spec.input_dim = state_dim + 1;  // state features plus normalized phase
  spec.hidden.assign(static_cast<std::size_t>(std::max(depth, 0)), width);
  spec.output_dim = action_dim;
  spec.tanh_output = true;
  net_ = Mlp(spec, rng);
}

std::vector<double> Actor::act(const std::vector<double>& state, double phase_norm) const {
  if (static_cast<std::int32_t>(state.size()) != state_dim_) {
    throw std::invalid_argument("actor: state feature size mismatch");
  }
  std::vector<double> input = state;
  input.push_back(phase_norm);
  return net_.forward(input);
}

// ---------------------------------------------------------------------------
// HcCritic

HcCritic::HcCritic(const HcConfig& config, Rng& rng) : config_(config) {
  if (config.state_dim <= 0 || config.action_dim <= 0) {
    throw std::invalid_argument("critic: dimensions must be positive");
  }
  if (config.max_interval_len < 1) {
    throw std::invalid_argument("critic: max interval length must be at least 1");
  }
  if (config.overlap < 0) throw std::invalid_argument("critic: overlap must be nonnegative");
  if (config.lambda < 0.0) throw std::invalid_argument("critic: lambda must be nonnegative");
  const std::int32_t step_dim = config.state_dim + config.action_dim;
  h_ = HStructure(config.kind, config.pair_span, step_dim, config.width, config.depth, rng);
  MlpSpec c_spec;
  c_spec.input_dim = step_dim + 1;  // state, action, normalized phase
  c_spec.hidden.assign(static_cast<std::size_t>(std::max(config.depth, 0)), config.width);
  c_spec.output_dim = 1;
  c_spec.tanh_output = false;
  c_ = Mlp(c_spec, rng);
  h_target_ = h_;
  c_target_ = c_;
}

std::vector<double> HcCritic::c_input(const std::vector<double>& state,
                                      const std::vector<double>& action,
                                      std::int32_t phase) const {
  if (static_cast<std::int32_t>(state.size()) != config_.state_dim) {
    throw std::invalid_argument("critic: state feature size mismatch");
  }
  if (static_cast<std::int32_t>(action.size()) != config_.action_dim) {
    throw std::invalid_argument("critic: action feature size mismatch");
  }
  std::vector<double> input;
  input.reserve(state.size() + action.size() + 1);
  input.insert(input.end(), state.begin(), state.end());
  input.insert(input.end(), action.begin(), action.end());
  input.push_back(phase_norm(phase));
  return input;
}

double HcCritic::h_value(const SegmentFeatures& segment) const {
  if (segment.total_len() < 1) throw std::invalid_argument("critic: empty segment");
  return h_.value(history_steps(segment));
}

double HcCritic::c_value(const SegmentFeatures& segment) const {
  if (segment.total_len() < 1) throw std::invalid_argument("critic: empty segment");
  const StepFeatures& last = segment.last();
  return c_.forward_scalar(c_input(last.state, last.action, segment.current_len() - 1));
}

double HcCritic::value(const SegmentFeatures& segment) const {
  return h_value(segment) + c_value(segment);
}

std::int64_t HcCritic::parameter_count() const {
  return h_.parameter_count() + c_.parameter_count();
}

std::vector<double> HcCritic::parameters() const {
  std::vector<double> flat = h_.parameters();
  flat.insert(flat.end(), c_.parameters().begin(), c_.parameters().end());
  return flat;
}

void HcCritic::set_parameters(const std::vector<double>& flat) {
  if (static_cast<std::int64_t>(flat.size()) != parameter_count()) {
    throw std::invalid_argument("critic: parameter vector size mismatch");
  }
  const auto h_count = static_cast<std::size_t>(h_.parameter_count());
  h_.set_parameters({flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(h_count)});
  std::copy(flat.begin() + static_cast<std::ptrdiff_t>(h_count), flat.end(),
            c_.parameters().begin());
}

void HcCritic::soft_update_targets(double tau) {
  check_tau(tau);
  for (std::size_t i = 0; i < h_.nets().size(); ++i) {
    blend_into(h_.nets()[i].parameters(), h_target_.nets()[i].parameters(), tau);
  }
  blend_into(c_.parameters(), c_target_.parameters(), tau);
}

// ---------------------------------------------------------------------------
// MonolithicCritic

MonolithicCritic::MonolithicCritic(std::int32_t overlap, std::int32_t max_interval_len,
                                   std::int32_t state_dim, std::int32_t action_dim,
                                   std::int32_t width, std::int32_t depth, Rng& rng)
    : overlap_(overlap),
      max_interval_len_(max_interval_len),
      state_dim_(state_dim),
      action_dim_(action_dim) {
  if (overlap < 0) throw std::invalid_argument("comparison critic: overlap must be nonnegative");
  if (max_interval_len < 1) {
    throw std::invalid_argument("comparison critic: max interval length must be at least 1");
  }
  if (state_dim <= 0 || action_dim <= 0) {
    throw std::invalid_argument("comparison critic: dimensions must be positive");
  }
  MlpSpec spec;
  spec.input_dim = slots() * (state_dim + action_dim + 1);
  spec.hidden.assign(static_cast<std::size_t>(std::max(depth, 0)), width);
  spec.output_dim = 1;
  spec.tanh_output = false;
  net_ = Mlp(spec, rng);
  net_target_ = net_;
}

std::vector<double> MonolithicCritic::featurize(const SegmentFeatures& segment) const {
  const std::int32_t total = segment.total_len();
  if (total > slots()) {
    throw std::length_error("comparison critic: segment longer than the slot layout");
  }
  const std::int32_t per_slot = state_dim_ + action_dim_ + 1;
  std::vector<double> features(static_cast<std::size_t>(slots()) * per_slot, 0.0);
  for (std::int32_t j = 0; j < total; ++j) {
    const StepFeatures& step = segment.steps[static_cast<std::size_t>(j)];
    if (step.padding) continue;  // masked out: zeros with validity 0
    if (static_cast<std::int32_t>(step.state.size()) != state_dim_ ||
        static_cast<std::int32_t>(step.action.size()) != action_dim_) {
      throw std::invalid_argument("comparison critic: step feature size mismatch");
    }
    const std::int32_t slot = slots() - total + j;  // right-aligned
    const std::size_t base = static_cast<std::size_t>(slot) * per_slot;
    std::copy(step.state.begin(), step.state.end(),
              features.begin() + static_cast<std::ptrdiff_t>(base));
    std::copy(step.action.begin(), step.action.end(),
              features.begin() + static_cast<std::ptrdiff_t>(base + step.state.size()));
    features[base + static_cast<std::size_t>(per_slot) - 1] = 1.0;  // validity flag
  }
  return features;
}

double MonolithicCritic::value(const SegmentFeatures& segment) const {
  return net_.forward_scalar(featurize(segment));
}

void MonolithicCritic::soft_update_targets(double tau) {
  check_tau(tau);
  blend_into(net_.parameters(), net_target_.parameters(), tau);
}

// ---------------------------------------------------------------------------
// Batch operations

LossResult hc_td_loss(const HcCritic& critic, const std::vector<ReplayRecord>& batch,
                      const Actor& policy, double gamma) {
  if (batch.empty()) throw std::invalid_argument("td loss: empty batch");
  const HcConfig& config = critic.config();
  const auto h_count = static_cast<std::size_t>(critic.h().parameter_count());
  const auto c_count = static_cast<std::size_t>(critic.c().parameter_count());
  std::vector<double> h_grad(h_count, 0.0);
  std::vector<double> c_grad(c_count, 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());

  double loss = 0.0;
  std::vector<RegSample> completed;
  for (const ReplayRecord& record : batch) {
    validate_record(record);
    if (record.phase >= config.max_interval_len) {
      throw std::invalid_argument("td loss: phase exceeds the maximum interval length");
    }
    const SegmentFeatures& seg = record.segment;
    const std::vector<StepFeatures> history = history_steps(seg);
    const std::vector<double> c_in =
        critic.c_input(seg.last().state, seg.last().action, record.phase);
    const double pred = critic.h().value(history) + critic.c().forward_scalar(c_in);

    double y = record.reward;
    if (!record.next_terminal) {
      const std::int32_t next_phase = record.interval_end ? 0 : record.phase + 1;
      const std::vector<StepFeatures> next_history =
          next_history_steps(seg, record.interval_end, config.overlap);
      const std::vector<double> next_action =
          policy.act(record.next_state, critic.phase_norm(next_phase));
      const double next_value =
          critic.h_target().value(next_history) +
          critic.c_target().forward_scalar(
              critic.c_input(record.next_state, next_action, next_phase));
      y += gamma * next_value;
    }

    const double delta = pred - y;
    loss += delta * delta * inv_m;
    const double seed = 2.0 * delta * inv_m;
    critic.h().value_backward(history, seed, h_grad);
    const Mlp::Backprop bp = critic.c().backward(c_in, {seed});
    for (std::size_t i = 0; i < c_count; ++i) c_grad[i] += bp.wrt_params[i];

    if (record.interval_end) completed.push_back({seg, record.reward});
  }

  LossResult result;
  result.td = loss;
  if (config.lambda > 0.0 && !completed.empty()) {
    const LossResult reg = reg_loss(critic.h(), completed);
    result.reg = reg.loss;
    loss += config.lambda * reg.loss;
    for (std::size_t i = 0; i < h_count; ++i) h_grad[i] += config.lambda * reg.grad[i];
  }

  result.loss = loss;
  result.grad = std::move(h_grad);
  result.grad.insert(result.grad.end(), c_grad.begin(), c_grad.end());
  return result;
}

LossResult reg_loss(const HStructure& h, const std::vector<RegSample>& completed) {
  if (completed.empty()) throw std::invalid_argument("interval regression: empty sample set");
  LossResult result;
  result.grad.assign(static_cast<std::size_t>(h.parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(completed.size());
  for (const RegSample& sample : completed) {
    const double value = h.value(sample.segment.steps);
    const double delta = value - sample.reward;
    result.loss += delta * delta * inv_m;
    h.value_backward(sample.segment.steps, 2.0 * delta * inv_m, result.grad);
  }
  result.reg = result.loss;
  return result;
}

namespace {

// Per-record gradient, with respect to the policy parameters, of the
// decomposed critic's current-step part at the policy's own action.
std::vector<double> hc_record_policy_grad(const HcCritic& critic, const Actor& policy,
                                          const ReplayRecord& record, double scale) {
  const SegmentFeatures& seg = record.segment;
  const std::vector<double>& state = seg.last().state;
  std::vector<double> actor_in = state;
  actor_in.push_back(critic.phase_norm(record.phase));
  const std::vector<double> action = policy.net().forward(actor_in);

  const std::vector<double> c_in = critic.c_input(state, action, record.phase);
  const Mlp::Backprop c_bp = critic.c().backward(c_in, {scale});
  const std::size_t state_dim = state.size();
  std::vector<double> action_seed(action.size());
  for (std::size_t d = 0; d < action.size(); ++d) {
    action_seed[d] = c_bp.wrt_input[state_dim + d];
  }
  return policy.net().backward(actor_in, action_seed).wrt_params;
}

// Same through the full-segment comparison critic: the policy action is
// substituted into the final slot and the chain runs through that slot's
// action coordinates.
std::vector<double> mono_record_policy_grad(const MonolithicCritic& critic, const Actor& policy,
                                            const ReplayRecord& record, double scale) {
  const SegmentFeatures& seg = record.segment;
  const std::vector<double>& state = seg.last().state;
  std::vector<double> actor_in = state;
  actor_in.push_back(critic.phase_norm(record.phase));
  const std::vector<double> action = policy.net().forward(actor_in);

  SegmentFeatures swapped = seg;
  swapped.steps.back().action = action;
  const std::vector<double> features = critic.featurize(swapped);
  const Mlp::Backprop bp = critic.net().backward(features, {scale});
  const std::int32_t per_slot = critic.state_dim() + critic.action_dim() + 1;
  const std::size_t base =
      static_cast<std::size_t>(critic.slots() - 1) * per_slot + critic.state_dim();
  std::vector<double> action_seed(action.size());
  for (std::size_t d = 0; d < action.size(); ++d) action_seed[d] = bp.wrt_input[base + d];
  return policy.net().backward(actor_in, action_seed).wrt_params;
}

}  // namespace

std::vector<double> hc_policy_gradient(const HcCritic& critic,
                                       const std::vector<ReplayRecord>& batch,
                                       const Actor& policy) {
  if (batch.empty()) throw std::invalid_argument("policy gradient: empty batch");
  std::vector<double> grad(static_cast<std::size_t>(policy.net().parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const ReplayRecord& record : batch) {
    validate_record(record);
    const std::vector<double> sample = hc_record_policy_grad(critic, policy, record, inv_m);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += sample[i];
  }
  return grad;
}

LossResult monolithic_td_loss(const MonolithicCritic& critic,
                              const std::vector<ReplayRecord>& batch, const Actor& policy,
                              double gamma) {
  if (batch.empty()) throw std::invalid_argument("td loss: empty batch");
  LossResult result;
  result.grad.assign(static_cast<std::size_t>(critic.net().parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const ReplayRecord& record : batch) {
    validate_record(record);
    if (record.phase >= critic.max_interval_len()) {
      throw std::invalid_argument("td loss: phase exceeds the maximum interval length");
    }
    const SegmentFeatures& seg = record.segment;
    const std::vector<double> features = critic.featurize(seg);
    const double pred = critic.net().forward_scalar(features);

    double y = record.reward;
    if (!record.next_terminal) {
      const std::int32_t next_phase = record.interval_end ? 0 : record.phase + 1;
      const std::vector<double> next_action =
          policy.act(record.next_state, critic.phase_norm(next_phase));
      SegmentFeatures next_seg;
      next_seg.steps = next_history_steps(seg, record.interval_end, critic.overlap());
      next_seg.prefix_len = static_cast<std::int32_t>(next_seg.steps.size()) -
                            (record.interval_end ? 0 : seg.current_len());
      next_seg.steps.push_back({record.next_state, next_action, false});
      y += gamma * critic.net_target().forward_scalar(critic.featurize(next_seg));
    }

    const double delta = pred - y;
    result.loss += delta * delta * inv_m;
    const Mlp::Backprop bp = critic.net().backward(features, {2.0 * delta * inv_m});
    for (std::size_t i = 0; i < result.grad.size(); ++i) result.grad[i] += bp.wrt_params[i];
  }
  result.td = result.loss;
  return result;
}

std::vector<double> monolithic_trajectory_gradient(const MonolithicCritic& critic,
                                                   const std::vector<ReplayRecord>& batch,
                                                   const Actor& policy) {
  if (batch.empty()) throw std::invalid_argument("policy gradient: empty batch");
  std::vector<double> grad(static_cast<std::size_t>(policy.net().parameter_count()), 0.0);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  for (const ReplayRecord& record : batch) {
    validate_record(record);
    const std::vector<double> sample = mono_record_policy_grad(critic, policy, record, inv_m);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += sample[i];
  }
  return grad;
}

double summed_sample_variance(const std::vector<std::vector<double>>& rows) {
  if (rows.size() < 2) {
    throw std::invalid_argument("sample variance: need at least two samples");
  }
  const std::size_t n = rows[0].size();
  for (const std::vector<double>& row : rows) {
    if (row.size() != n) throw std::invalid_argument("sample variance: ragged rows");
  }
  const double m = static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double mean = 0.0;
    for (const std::vector<double>& row : rows) mean += row[j];
    mean /= m;
    double ss = 0.0;
    for (const std::vector<double>& row : rows) {
      const double d = row[j] - mean;
      ss += d * d;
    }
    total += ss / (m - 1.0);
  }
  return total;
}

VarianceReport estimate_gradient_variance(const GradientVarianceProbe& probe) {
  if (probe.hc == nullptr || probe.monolithic == nullptr || probe.actor == nullptr) {
    throw std::invalid_argument("gradient variance: probe is missing a component");
  }
  if (probe.batch.size() < 2) {
    throw std::invalid_argument("gradient variance: need at least two records");
  }
  const Actor& actor = *probe.actor;
  const auto offset = static_cast<std::size_t>(actor.net().final_layer_offset());
  const auto count = static_cast<std::size_t>(actor.net().final_layer_count());
  auto final_slice = [&](const std::vector<double>& full) {
    return std::vector<double>(full.begin() + static_cast<std::ptrdiff_t>(offset),
                               full.begin() + static_cast<std::ptrdiff_t>(offset + count));
  };
  std::vector<std::vector<double>> hc_rows, mono_rows;
  hc_rows.reserve(probe.batch.size());
  mono_rows.reserve(probe.batch.size());
  for (const ReplayRecord& record : probe.batch) {
    validate_record(record);
    hc_rows.push_back(final_slice(hc_record_policy_grad(*probe.hc, actor, record, 1.0)));
    mono_rows.push_back(
        final_slice(mono_record_policy_grad(*probe.monolithic, actor, record, 1.0)));
  }
  VarianceReport report;
  report.hc_variance = summed_sample_variance(hc_rows);
  report.monolithic_variance = summed_sample_variance(mono_rows);
  return report;
}

}  // namespace drlab
