#include "drlab/run/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "drlab/approx/hc.hpp"
#include "drlab/approx/mlp.hpp"
#include "drlab/approx/records.hpp"
#include "drlab/core/policy.hpp"
#include "drlab/core/rng.hpp"
#include "drlab/core/spec.hpp"
#include "drlab/fixtures/fixtures.hpp"
#include "drlab/run/generators.hpp"
#include "drlab/tabular/engine.hpp"
#include "drlab/tabular/qtable.hpp"
#include "drlab/tabular/vanilla.hpp"

namespace drlab {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(12);
  s << v;
  return s.str();
}

double rel_error(double analytic, double numeric) {
  const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
  return std::abs(analytic - numeric) / scale;
}

bool bits_equal(double a, double b) {
  std::uint64_t x = 0, y = 0;
  std::memcpy(&x, &a, sizeof(x));
  std::memcpy(&y, &b, sizeof(y));
  return x == y;
}

void run_check(VerifyReport& report, std::string name,
               const std::function<void(VerifyCheck&)>& body) {
  VerifyCheck check;
  check.name = std::move(name);
  const auto start = Clock::now();
  try {
    body(check);
  } catch (const std::exception& error) {
    check.passed = false;
    check.measured = std::string("exception: ") + error.what();
  }
  check.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  report.checks.push_back(std::move(check));
}

// ---------------------------------------------------------------------------
// Counterexample checks

// Phase-independent data policy at the fork state A: first action with
// probability 1-p, second with probability p.
PolicyS first_action_mixture(const DrmdpSpec& spec, double p) {
  PolicyS policy(spec);
  const StateId fork = spec.state_id("A");
  for (std::int32_t phase = 0; phase < spec.interval_law.max_n(); ++phase) {
    policy.set_row(fork, phase, {1.0 - p, p});
  }
  return policy;
}

void check_fixed_point_bias(VerifyReport& report, double gamma) {
  run_check(report, "fixed_point_bias gamma=" + fmt(gamma), [gamma](VerifyCheck& check) {
    const NamedFixture fixture = build_fixture(FixtureName::FixedPointBias, gamma);
    const DrmdpSpec& spec = fixture.spec;
    const double expect_greedy = -0.495 * gamma;
    double max_gap = 0.0;
    const auto track = [&max_gap](double got, double want) {
      max_gap = std::max(max_gap, std::abs(got - want));
    };

    // Greedy iteration on the per-step critic's fixed point converges to
    // the poor first action from every initial policy tried, while
    // trajectory-value policy iteration always recovers the optimum.
    const double greedy_uniform =
        vanilla_iteration(spec, PolicyS::uniform(spec)).returns.back();
    const double trajectory_uniform =
        policy_iteration(spec, PolicyS::uniform(spec)).returns.back();
    track(greedy_uniform, expect_greedy);
    track(trajectory_uniform, 0.0);
    for (const double p : {0.0, 0.5, 1.0}) {
      track(vanilla_iteration(spec, first_action_mixture(spec, p)).returns.back(),
            expect_greedy);
      track(policy_iteration(spec, first_action_mixture(spec, p)).returns.back(), 0.0);
    }

    const FixedPointBiasReport bias = reproduce_fixed_point_bias(gamma);

    // Per-step fixed-point values. The bootstrap chain C -> A(a_0) is
    // data-policy independent; the misranked pair D(d) / A(a_1) is
    // checked against its closed form at p = 1, where every published
    // form of the history weighting coincides.
    const StateId fork = spec.state_id("A");
    const StateId good_route = spec.state_id("C");
    const StateId merge = spec.state_id("D");
    for (const double p : {0.0, 0.5, 1.0}) {
      const StateQTable q = vanilla_q_fixed_point(spec, first_action_mixture(spec, p));
      track(q.value(good_route, 0), 0.01);
      track(q.value(fork, 0), 0.01 * gamma);
      if (p == 1.0) {
        track(q.value(merge, 0), (p - 1.0) / 2.0);
        track(q.value(fork, 1), gamma * (p - 1.0) / 2.0);
      }
    }

    check.passed = bias.vanilla_flips_optimal_init && max_gap <= 1e-9;
    std::ostringstream m;
    m.precision(12);
    m << "greedy J = " << greedy_uniform << " (expect " << expect_greedy
      << "); trajectory J = " << trajectory_uniform
      << " (expect 0); optimal init flipped = "
      << (bias.vanilla_flips_optimal_init ? "yes" : "no")
      << "; max |error| = " << max_gap;
    check.measured = m.str();
  });
}

void check_bias_history_weighting(VerifyReport& report, double gamma) {
  run_check(report, "q_first_action_p_sweep gamma=" + fmt(gamma),
            [gamma](VerifyCheck& check) {
    const DrmdpSpec spec = build_fixture(FixtureName::FixedPointBias, gamma).spec;
    const StateId fork = spec.state_id("A");
    const StateId merge = spec.state_id("D");
    double max_gap = 0.0;
    std::ostringstream m;
    m.precision(12);
    for (const double p : {0.0, 0.5, 1.0}) {
      const StateQTable q = vanilla_q_fixed_point(spec, first_action_mixture(spec, p));
      const double q_merge = q.value(merge, 0);
      const double q_a1 = q.value(fork, 1);
      // The stored targets into the merge state are +1 (via a_1) and -1
      // (via the alternative route); conditioning on the history makes
      // the mean (p-1)/(p+1), while weighting the two routes uniformly
      // instead would give (p-1)/2. Both vanish at p = 1.
      const double conditional = (p - 1.0) / (p + 1.0);
      const double uniform_weight = (p - 1.0) / 2.0;
      max_gap = std::max(max_gap, std::abs(q_merge - conditional));
      max_gap = std::max(max_gap, std::abs(q_a1 - gamma * conditional));
      m << "p=" << p << ": Q(A,a_1) = " << q_a1 << " [history-conditional "
        << gamma * conditional << ", uniform-weight " << gamma * uniform_weight << "]; ";
    }
    m << "max |error| vs history-conditional form = " << max_gap;
    check.passed = max_gap <= 1e-9;
    check.measured = m.str();
  });
}

void check_policy_class_gap(VerifyReport& report) {
  run_check(report, "policy_class_gap", [](VerifyCheck& check) {
    const double gamma = 0.99;
    const NamedFixture fixture = build_fixture(FixtureName::XorPolicyClass, gamma);
    const BestInClassResult best_history =
        best_in_class(fixture, PolicyClassKind::HistoryIndexed);
    const BestInClassResult best_phase =
        best_in_class(fixture, PolicyClassKind::PhaseIndexed);
    const bool history_exact = best_history.value == gamma;
    const bool phase_exact = best_phase.value == 0.5 * gamma;
    check.passed = history_exact && phase_exact;
    std::ostringstream m;
    m.precision(12);
    m << "history-indexed best = " << best_history.value << " (expect " << gamma
      << " exactly); phase-indexed best = " << best_phase.value << " (expect "
      << 0.5 * gamma << " exactly)";
    check.measured = m.str();
  });
}

void check_off_policy_bias(VerifyReport& report) {
  run_check(report, "off_policy_bias", [](VerifyCheck& check) {
    const DrmdpSpec spec = off_policy_bias_example_spec();
    const StateId decision = spec.state_id("Z");
    const OffPolicyBiasReport skewed = off_policy_bias_report(
        spec, off_policy_bias_example_behaviors(spec, true), decision, 2);
    const OffPolicyBiasReport even = off_policy_bias_report(
        spec, off_policy_bias_example_behaviors(spec, false), decision, 2);
    const bool shaped = skewed.rows.size() == 2 && even.rows.size() == 2;
    if (!shaped) {
      check.passed = false;
      check.measured = "unexpected report shape";
      return;
    }
    const double spread =
        std::abs(skewed.rows[0].expected_target - skewed.rows[1].expected_target);
    const double even_spread =
        std::abs(even.rows[0].expected_target - even.rows[1].expected_target);
    check.passed = std::abs(skewed.rows[0].expected_target - 0.18) <= 1e-12 &&
                   std::abs(skewed.rows[1].expected_target - 0.82) <= 1e-12 &&
                   spread > 0.1 && even_spread <= 1e-12 &&
                   std::abs(even.rows[0].expected_target - 0.5) <= 1e-12;
    std::ostringstream m;
    m.precision(12);
    m << "mixed behaviors: per-action targets (" << skewed.rows[0].expected_target << ", "
      << skewed.rows[1].expected_target << "), spread " << spread
      << "; identical behaviors: (" << even.rows[0].expected_target << ", "
      << even.rows[1].expected_target << "), spread " << even_spread;
    check.measured = m.str();
  });
}

// ---------------------------------------------------------------------------
// Theory checks on randomly generated processes

void check_contraction(VerifyReport& report) {
  run_check(report, "contraction_ratio", [](VerifyCheck& check) {
    Rng rng(20'260'822);
    constexpr RewardKind kKinds[4] = {RewardKind::Sum, RewardKind::WeightedSum,
                                      RewardKind::Max, RewardKind::Square};
    double worst_ratio_minus_gamma = -std::numeric_limits<double>::infinity();
    std::int64_t ratios = 0;
    bool ok = true;
    for (std::int32_t trial = 0; trial < 50; ++trial) {
      const DrmdpSpec spec =
          (trial % 2 == 0)
              ? random_layered_spec(rng, kKinds[(trial / 2) % 4], trial % 3)
              : random_cyclic_spec(rng, trial % 2, /*mixed_lengths=*/true);
      const PolicyS pi = random_policy(rng, spec, false);
      TrajectoryQTable x = TrajectoryQTable::zero(spec);
      TrajectoryQTable next = bellman_sweep(x, pi);
      double prev = next.sup_distance(x);
      x = std::move(next);
      // Stop above the rounding-noise floor: once residuals are ~1e-8
      // the per-entry arithmetic error dominates the 1e-9 margin.
      for (std::int32_t iter = 0; iter < 400 && prev > 1e-8; ++iter) {
        next = bellman_sweep(x, pi);
        const double cur = next.sup_distance(x);
        if (cur > (spec.gamma + 1e-9) * prev + 1e-12) ok = false;
        if (prev > 0.0) {
          worst_ratio_minus_gamma =
              std::max(worst_ratio_minus_gamma, cur / prev - spec.gamma);
        }
        ++ratios;
        x = std::move(next);
        prev = cur;
      }
    }
    check.passed = ok && ratios > 0;
    std::ostringstream m;
    m.precision(6);
    m << ratios << " consecutive-residual ratios over 50 processes; worst ratio - gamma = "
      << worst_ratio_minus_gamma << " (allowed 1e-9)";
    check.measured = m.str();
  });
}

void check_fixed_point_matches_enumeration(VerifyReport& report) {
  run_check(report, "fixed_point_enumeration_match", [](VerifyCheck& check) {
    Rng rng(7'050'311);
    constexpr RewardKind kKinds[4] = {RewardKind::Sum, RewardKind::WeightedSum,
                                      RewardKind::Max, RewardKind::Square};
    double worst_solve = 0.0;
    double worst_oracle_residual = 0.0;
    for (std::int32_t trial = 0; trial < 50; ++trial) {
      const bool layered = trial < 35;
      const DrmdpSpec spec =
          layered ? random_layered_spec(rng, kKinds[trial % 4], trial % 3)
                  : random_cyclic_spec(rng, trial % 2, /*mixed_lengths=*/false);
      const PolicyS pi = random_policy(rng, spec, /*deterministic=*/!layered);
      const TrajectoryQTable oracle = exact_q_by_enumeration(spec, pi);
      worst_oracle_residual = std::max(
          worst_oracle_residual, bellman_sweep(oracle, pi).sup_distance(oracle));
      const FixedPointResult solved = solve_fixed_point(spec, pi, 1e-13);
      worst_solve = std::max(worst_solve, solved.table.sup_distance(oracle));
    }
    check.passed = worst_solve <= 1e-8 && worst_oracle_residual <= 1e-9;
    std::ostringstream m;
    m.precision(6);
    m << "50 processes; max |solver - direct enumeration| = " << worst_solve
      << " (allowed 1e-8); max one-sweep movement of the enumerated table = "
      << worst_oracle_residual << " (allowed 1e-9)";
    check.measured = m.str();
  });
}

void check_order_invariance(VerifyReport& report) {
  run_check(report, "order_invariance", [](VerifyCheck& check) {
    Rng rng(33'101);
    std::int64_t comparisons = 0;
    std::int32_t violations = 0;
    std::string first_witness;
    for (std::int32_t trial = 0; trial < 100; ++trial) {
      const DrmdpSpec spec = random_pi_spec(rng, /*allow_max=*/trial >= 50);
      const PolicyS pi = random_policy(rng, spec, false);
      const FixedPointResult solved = solve_fixed_point(spec, pi, 1e-13);
      const OrderCheckReport order = check_order_invariance(solved.table, 1e-12);
      comparisons += order.comparisons;
      if (!order.holds) {
        ++violations;
        if (first_witness.empty()) first_witness = order.witness;
      }
    }
    check.passed = violations == 0 && comparisons > 0;
    std::ostringstream m;
    m << violations << " sign violations over " << comparisons
      << " history-pair comparisons (100 processes, ties at 1e-12)";
    if (!first_witness.empty()) m << "; first witness: " << first_witness;
    check.measured = m.str();
  });
}

void check_policy_improvement(VerifyReport& report) {
  run_check(report, "policy_improvement", [](VerifyCheck& check) {
    Rng rng(90'417);
    double worst_return_drop = -std::numeric_limits<double>::infinity();
    double worst_pointwise_drop = -std::numeric_limits<double>::infinity();
    std::int32_t max_rounds_used = 0;
    bool all_converged = true;
    for (std::int32_t trial = 0; trial < 50; ++trial) {
      const DrmdpSpec spec = random_pi_spec(rng, /*allow_max=*/trial % 2 == 1);
      const PolicyS init = (trial % 2 == 0) ? PolicyS::uniform(spec)
                                            : random_policy(rng, spec, false);
      const PolicyIterationResult result = policy_iteration(spec, init, /*max_rounds=*/20);
      all_converged = all_converged && result.converged;
      max_rounds_used = std::max(
          max_rounds_used, static_cast<std::int32_t>(result.policies.size()) - 1);
      for (std::size_t i = 1; i < result.returns.size(); ++i) {
        worst_return_drop =
            std::max(worst_return_drop, result.returns[i - 1] - result.returns[i]);
      }
      TrajectoryQTable prev_table =
          solve_fixed_point(spec, result.policies.front(), 1e-13).table;
      for (std::size_t k = 1; k < result.policies.size(); ++k) {
        TrajectoryQTable next_table =
            solve_fixed_point(spec, result.policies[k], 1e-13).table;
        for (const auto& [key, value] : prev_table.entries()) {
          worst_pointwise_drop =
              std::max(worst_pointwise_drop, value - next_table.value(key));
        }
        prev_table = std::move(next_table);
      }
    }
    check.passed = all_converged && worst_return_drop <= 1e-9 &&
                   worst_pointwise_drop <= 1e-9 && max_rounds_used <= 20;
    std::ostringstream m;
    m.precision(6);
    m << "50 processes; max return decrease across iterates = " << worst_return_drop
      << "; max per-key value decrease = " << worst_pointwise_drop
      << " (both allowed 1e-9); max improvement rounds = " << max_rounds_used
      << "; all converged = " << (all_converged ? "yes" : "no");
    check.measured = m.str();
  });
}

// ---------------------------------------------------------------------------
// Gradient checks

StepFeatures random_step(Rng& rng, std::int32_t state_dim, std::int32_t action_dim) {
  StepFeatures step;
  for (std::int32_t i = 0; i < state_dim; ++i) step.state.push_back(rng.uniform(-1.0, 1.0));
  for (std::int32_t i = 0; i < action_dim; ++i) step.action.push_back(rng.uniform(-1.0, 1.0));
  return step;
}

ReplayRecord random_record(Rng& rng, std::int32_t state_dim, std::int32_t action_dim,
                           std::int32_t max_len, std::int32_t overlap) {
  SegmentFeatures segment;
  for (std::int32_t i = 0; i < overlap; ++i) {
    if (rng.uniform() < 0.4) {
      StepFeatures pad;
      pad.padding = true;
      segment.steps.push_back(pad);
    } else {
      segment.steps.push_back(random_step(rng, state_dim, action_dim));
    }
  }
  segment.prefix_len = overlap;
  const std::int32_t len = 1 + static_cast<std::int32_t>(rng.below(max_len));
  for (std::int32_t i = 0; i < len; ++i) {
    segment.steps.push_back(random_step(rng, state_dim, action_dim));
  }
  ReplayRecord record;
  record.phase = len - 1;
  record.segment = std::move(segment);
  record.interval_end = (len == max_len) || rng.uniform() < 0.3;
  record.reward = record.interval_end ? rng.uniform(-1.0, 1.0) : 0.0;
  for (std::int32_t i = 0; i < state_dim; ++i) {
    record.next_state.push_back(rng.uniform(-1.0, 1.0));
  }
  record.next_terminal = record.interval_end && rng.uniform() < 0.25;
  return record;
}

std::vector<ReplayRecord> random_batch(Rng& rng, std::int32_t state_dim,
                                       std::int32_t action_dim, std::int32_t max_len,
                                       std::int32_t overlap, std::int32_t size) {
  std::vector<ReplayRecord> batch;
  for (std::int32_t i = 0; i < size; ++i) {
    batch.push_back(random_record(rng, state_dim, action_dim, max_len, overlap));
  }
  return batch;
}

constexpr double kFdStep = 1e-6;

double fd_mlp_family(bool tanh_output, Rng& rng) {
  MlpSpec spec;
  spec.input_dim = 4;
  spec.hidden = tanh_output ? std::vector<std::int32_t>{5} : std::vector<std::int32_t>{6, 5};
  spec.output_dim = 3;
  spec.tanh_output = tanh_output;
  Mlp net(spec, rng);
  return fd_check_mlp(net, rng, 100, kFdStep).max_rel_error;
}

double fd_history_family(HKind kind, std::int32_t pair_span, Rng& rng) {
  HStructure h(kind, pair_span, /*step_dim=*/4, /*width=*/5, /*depth=*/1, rng);
  const std::vector<double> saved = h.parameters();
  double worst = 0.0;
  for (std::int32_t point = 0; point < 100; ++point) {
    std::vector<StepFeatures> steps;
    const std::int32_t len = static_cast<std::int32_t>(rng.below(5));
    for (std::int32_t i = 0; i < len; ++i) {
      if (rng.uniform() < 0.2) {
        StepFeatures pad;
        pad.padding = true;
        steps.push_back(pad);
      } else {
        steps.push_back(random_step(rng, 2, 2));
      }
    }
    std::vector<double> grad(static_cast<std::size_t>(h.parameter_count()), 0.0);
    h.value_backward(steps, 1.0, grad);
    const auto idx = static_cast<std::size_t>(rng.below(h.parameter_count()));
    std::vector<double> params = saved;
    params[idx] = saved[idx] + kFdStep;
    h.set_parameters(params);
    const double up = h.value(steps);
    params[idx] = saved[idx] - kFdStep;
    h.set_parameters(params);
    const double down = h.value(steps);
    h.set_parameters(saved);
    worst = std::max(worst, rel_error(grad[idx], (up - down) / (2.0 * kFdStep)));
  }
  return worst;
}

HcConfig small_critic_config() {
  HcConfig config;
  config.kind = HKind::Singleton;
  config.state_dim = 2;
  config.action_dim = 2;
  config.width = 4;
  config.depth = 1;
  config.max_interval_len = 3;
  config.overlap = 1;
  config.lambda = 0.7;
  return config;
}

double fd_hc_loss_family(Rng& rng) {
  HcCritic critic(small_critic_config(), rng);
  Actor actor(2, 2, 4, 1, rng);
  const std::vector<double> saved = critic.parameters();
  double worst = 0.0;
  for (std::int32_t block = 0; block < 10; ++block) {
    const std::vector<ReplayRecord> batch = random_batch(rng, 2, 2, 3, 1, 3);
    const LossResult out = hc_td_loss(critic, batch, actor, 0.9);
    for (std::int32_t probe = 0; probe < 10; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(critic.parameter_count()));
      std::vector<double> params = saved;
      params[idx] = saved[idx] + kFdStep;
      critic.set_parameters(params);
      const double up = hc_td_loss(critic, batch, actor, 0.9).loss;
      params[idx] = saved[idx] - kFdStep;
      critic.set_parameters(params);
      const double down = hc_td_loss(critic, batch, actor, 0.9).loss;
      critic.set_parameters(saved);
      worst = std::max(worst, rel_error(out.grad[idx], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

double fd_monolithic_loss_family(Rng& rng) {
  MonolithicCritic critic(1, 3, 2, 2, 4, 1, rng);
  Actor actor(2, 2, 4, 1, rng);
  const std::vector<double> saved = critic.net().parameters();
  double worst = 0.0;
  for (std::int32_t block = 0; block < 10; ++block) {
    const std::vector<ReplayRecord> batch = random_batch(rng, 2, 2, 3, 1, 3);
    const LossResult out = monolithic_td_loss(critic, batch, actor, 0.9);
    for (std::int32_t probe = 0; probe < 10; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(critic.net().parameter_count()));
      critic.net().parameters()[idx] = saved[idx] + kFdStep;
      const double up = monolithic_td_loss(critic, batch, actor, 0.9).loss;
      critic.net().parameters()[idx] = saved[idx] - kFdStep;
      const double down = monolithic_td_loss(critic, batch, actor, 0.9).loss;
      critic.net().parameters()[idx] = saved[idx];
      worst = std::max(worst, rel_error(out.grad[idx], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

double fd_hc_policy_family(Rng& rng) {
  HcCritic critic(small_critic_config(), rng);
  Actor actor(2, 2, 4, 1, rng);
  double worst = 0.0;
  for (std::int32_t block = 0; block < 10; ++block) {
    const std::vector<ReplayRecord> batch = random_batch(rng, 2, 2, 3, 1, 3);
    const std::vector<double> analytic = hc_policy_gradient(critic, batch, actor);
    const auto objective = [&]() {
      double total = 0.0;
      for (const ReplayRecord& r : batch) {
        const std::vector<double>& s = r.segment.last().state;
        const std::vector<double> a = actor.act(s, critic.phase_norm(r.phase));
        total += critic.c().forward_scalar(critic.c_input(s, a, r.phase));
      }
      return total / static_cast<double>(batch.size());
    };
    std::vector<double>& params = actor.net().parameters();
    for (std::int32_t probe = 0; probe < 10; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(actor.net().parameter_count()));
      const double save = params[idx];
      params[idx] = save + kFdStep;
      const double up = objective();
      params[idx] = save - kFdStep;
      const double down = objective();
      params[idx] = save;
      worst = std::max(worst, rel_error(analytic[idx], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

double fd_monolithic_policy_family(Rng& rng) {
  MonolithicCritic critic(1, 3, 2, 2, 4, 1, rng);
  Actor actor(2, 2, 4, 1, rng);
  double worst = 0.0;
  for (std::int32_t block = 0; block < 10; ++block) {
    const std::vector<ReplayRecord> batch = random_batch(rng, 2, 2, 3, 1, 3);
    const std::vector<double> analytic =
        monolithic_trajectory_gradient(critic, batch, actor);
    const auto objective = [&]() {
      double total = 0.0;
      for (const ReplayRecord& r : batch) {
        SegmentFeatures swapped = r.segment;
        swapped.steps.back().action =
            actor.act(swapped.last().state, critic.phase_norm(r.phase));
        total += critic.value(swapped);
      }
      return total / static_cast<double>(batch.size());
    };
    std::vector<double>& params = actor.net().parameters();
    for (std::int32_t probe = 0; probe < 10; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(actor.net().parameter_count()));
      const double save = params[idx];
      params[idx] = save + kFdStep;
      const double up = objective();
      params[idx] = save - kFdStep;
      const double down = objective();
      params[idx] = save;
      worst = std::max(worst, rel_error(analytic[idx], (up - down) / (2.0 * kFdStep)));
    }
  }
  return worst;
}

void add_fd_check(VerifyReport& report, const char* family, std::uint64_t seed,
                  const std::function<double(Rng&)>& run_family) {
  run_check(report, std::string("finite_difference ") + family,
            [seed, &run_family](VerifyCheck& check) {
    Rng rng(seed);
    const double worst = run_family(rng);
    check.passed = worst < 1e-5;
    std::ostringstream m;
    m.precision(6);
    m << "100 random points; max relative error = " << worst << " (allowed 1e-5)";
    check.measured = m.str();
  });
}

void check_action_gradient_identity(VerifyReport& report) {
  run_check(report, "action_gradient_identity", [](VerifyCheck& check) {
    Rng rng(61'553);
    HcConfig config = small_critic_config();
    config.width = 5;
    config.depth = 2;
    config.lambda = 0.0;
    HcCritic critic(config, rng);
    bool history_invariant = true;
    double worst = 0.0;
    for (std::int32_t trial = 0; trial < 20; ++trial) {
      const ReplayRecord record = random_record(rng, 2, 2, 3, 1);
      const SegmentFeatures& segment = record.segment;

      // The history part must not move at all when the last action does.
      const double h_before = critic.h_value(segment);
      SegmentFeatures swapped = segment;
      for (double& a : swapped.steps.back().action) a = rng.uniform(-1.0, 1.0);
      history_invariant = history_invariant && bits_equal(h_before, critic.h_value(swapped));

      // The full value's action derivative equals the current-step
      // part's alone.
      const StepFeatures& last = segment.steps.back();
      const std::vector<double> c_in = critic.c_input(last.state, last.action, record.phase);
      const Mlp::Backprop bp = critic.c().backward(c_in, {1.0});
      for (std::size_t d = 0; d < last.action.size(); ++d) {
        SegmentFeatures up = segment;
        SegmentFeatures down = segment;
        up.steps.back().action[d] += kFdStep;
        down.steps.back().action[d] -= kFdStep;
        const double numeric =
            (critic.value(up) - critic.value(down)) / (2.0 * kFdStep);
        worst = std::max(
            worst, rel_error(bp.wrt_input[last.state.size() + d], numeric));
      }
    }
    check.passed = history_invariant && worst < 1e-5;
    std::ostringstream m;
    m.precision(6);
    m << "history part bitwise unchanged under last-action swaps on 20 segments = "
      << (history_invariant ? "yes" : "NO")
      << "; max relative gap, full-value action derivative vs current-step derivative = "
      << worst;
    check.measured = m.str();
  });
}

void run_theory(VerifyReport& report) {
  check_contraction(report);
  check_fixed_point_matches_enumeration(report);
  check_order_invariance(report);
  check_policy_improvement(report);
}

void run_counterexamples(VerifyReport& report) {
  for (const double gamma : {0.5, 0.9, 0.99}) {
    check_fixed_point_bias(report, gamma);
    check_bias_history_weighting(report, gamma);
  }
  check_policy_class_gap(report);
  check_off_policy_bias(report);
}

void run_gradients(VerifyReport& report) {
  add_fd_check(report, "mlp_linear", 101, [](Rng& rng) { return fd_mlp_family(false, rng); });
  add_fd_check(report, "mlp_tanh", 102, [](Rng& rng) { return fd_mlp_family(true, rng); });
  add_fd_check(report, "history_singleton", 103,
               [](Rng& rng) { return fd_history_family(HKind::Singleton, 0, rng); });
  add_fd_check(report, "history_pairwise", 104,
               [](Rng& rng) { return fd_history_family(HKind::PairwiseK, 2, rng); });
  add_fd_check(report, "decomposed_td_loss", 105, fd_hc_loss_family);
  add_fd_check(report, "whole_segment_td_loss", 106, fd_monolithic_loss_family);
  add_fd_check(report, "decomposed_policy_gradient", 107, fd_hc_policy_family);
  add_fd_check(report, "whole_segment_policy_gradient", 108, fd_monolithic_policy_family);
  check_action_gradient_identity(report);
}

}  // namespace

const char* verify_suite_name(VerifySuite suite) {
  switch (suite) {
    case VerifySuite::Theory:
      return "theory";
    case VerifySuite::Counterexamples:
      return "counterexamples";
    case VerifySuite::Gradients:
      return "gradients";
    case VerifySuite::All:
      return "all";
  }
  throw std::invalid_argument("unknown verify suite");
}

VerifySuite verify_suite_from_string(const std::string& name) {
  if (name == "theory") return VerifySuite::Theory;
  if (name == "counterexamples") return VerifySuite::Counterexamples;
  if (name == "gradients") return VerifySuite::Gradients;
  if (name == "all") return VerifySuite::All;
  throw std::invalid_argument("unknown verify suite: " + name +
                              " (expected theory, counterexamples, gradients, or all)");
}

bool VerifyReport::all_passed() const {
  if (checks.empty()) return false;
  for (const VerifyCheck& check : checks) {
    if (!check.passed) return false;
  }
  return true;
}

std::string VerifyReport::render() const {
  std::ostringstream out;
  std::size_t passed = 0;
  for (const VerifyCheck& check : checks) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.3f", check.seconds);
    out << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << "  (" << seconds
        << " s)  " << check.measured << "\n";
    if (check.passed) ++passed;
  }
  out << passed << "/" << checks.size() << " checks passed\n";
  return out.str();
}

VerifyReport run_verify(VerifySuite suite) {
  VerifyReport report;
  if (suite == VerifySuite::Theory || suite == VerifySuite::All) run_theory(report);
  if (suite == VerifySuite::Counterexamples || suite == VerifySuite::All) {
    run_counterexamples(report);
  }
  if (suite == VerifySuite::Gradients || suite == VerifySuite::All) run_gradients(report);
  return report;
}

}  // namespace drlab
