#include "drlab/fixtures/fixtures.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "drlab/core/feasibility.hpp"
#include "drlab/tabular/engine.hpp"
#include "drlab/tabular/vanilla.hpp"

namespace drlab {

namespace {

constexpr std::int64_t kEnumerationCap = 1 << 20;

DrmdpSpec xor_policy_class_spec(double gamma) {
  DrmdpSpec spec;
  spec.state_names = {"A_0", "A_1", "B", "C"};
  spec.action_names = {{"a_0"}, {"a_1"}, {"b_0", "b_1"}, {"end"}};
  const StateId A0 = 0, A1 = 1, B = 2, C = 3;
  spec.transition.resize(4);
  spec.transition[A0] = {{{B, 1.0}}};
  spec.transition[A1] = {{{B, 1.0}}};
  spec.transition[B] = {{{C, 1.0}}, {{C, 1.0}}};
  spec.transition[C] = {{{C, 1.0}}};
  spec.initial_dist = {{A0, 0.5}, {A1, 0.5}};
  spec.interval_law = IntervalLaw::fixed(2);
  spec.gamma = gamma;
  spec.overlap_c = 0;
  spec.reward.kind = RewardKind::Tabulated;
  // Interval reward is the XOR of the two route indices: only the pair
  // (first state's index, second action's index) matters.
  spec.reward.table[{{A0, 0}, {B, 0}}] = 0.0;
  spec.reward.table[{{A0, 0}, {B, 1}}] = 1.0;
  spec.reward.table[{{A1, 0}, {B, 0}}] = 1.0;
  spec.reward.table[{{A1, 0}, {B, 1}}] = 0.0;
  spec.reward.table[{{C, 0}, {C, 0}}] = 0.0;
  spec.validate();
  return spec;
}

DrmdpSpec fixed_point_bias_spec(double gamma) {
  DrmdpSpec spec;
  spec.state_names = {"A", "B", "C", "D", "C_0", "D_0"};
  spec.action_names = {{"a_0", "a_1"}, {"b"}, {"c"}, {"d"}, {"stay"}, {"stay"}};
  const StateId A = 0, B = 1, C = 2, D = 3, C0 = 4, D0 = 5;
  spec.transition.resize(6);
  spec.transition[A] = {{{C, 1.0}}, {{D, 1.0}}};
  spec.transition[B] = {{{D, 1.0}}};
  spec.transition[C] = {{{C0, 1.0}}};
  spec.transition[D] = {{{D0, 1.0}}};
  spec.transition[C0] = {{{C0, 1.0}}};
  spec.transition[D0] = {{{D0, 1.0}}};
  spec.initial_dist = {{A, 0.5}, {B, 0.5}};
  spec.interval_law = IntervalLaw::fixed(2);
  spec.gamma = gamma;
  spec.overlap_c = 0;
  spec.reward.kind = RewardKind::Sum;
  spec.reward.step_reward = {{0.01, 1.0}, {-1.0}, {0.0}, {0.0}, {0.0}, {0.0}};
  spec.validate();
  return spec;
}

DrmdpSpec optimal_not_in_pi_s_spec(double gamma) {
  DrmdpSpec spec;
  spec.state_names = {"A_b", "A_l", "B", "C_+", "C_-", "T"};
  spec.action_names = {{"a_10"}, {"a_0.1"}, {"b_+1", "b_-1"}, {"stay"}, {"go"}, {"stay"}};
  const StateId Ab = 0, Al = 1, B = 2, Cp = 3, Cm = 4, T = 5;
  spec.transition.resize(6);
  spec.transition[Ab] = {{{B, 1.0}}};
  spec.transition[Al] = {{{B, 1.0}}};
  spec.transition[B] = {{{Cp, 1.0}}, {{Cm, 1.0}}};
  spec.transition[Cp] = {{{Cp, 1.0}}};
  spec.transition[Cm] = {{{T, 1.0}}};
  spec.transition[T] = {{{T, 1.0}}};
  spec.initial_dist = {{Ab, 0.5}, {Al, 0.5}};
  spec.interval_law = IntervalLaw::fixed(2);
  spec.gamma = gamma;
  spec.overlap_c = 0;
  spec.reward.kind = RewardKind::Tabulated;
  // First interval pays i * j for first-step magnitude i in {10, 0.1} and
  // second-step sign j in {+1, -1}; the consolation interval through C_-
  // pays a flat 5.
  spec.reward.table[{{Ab, 0}, {B, 0}}] = 10.0;
  spec.reward.table[{{Ab, 0}, {B, 1}}] = -10.0;
  spec.reward.table[{{Al, 0}, {B, 0}}] = 0.1;
  spec.reward.table[{{Al, 0}, {B, 1}}] = -0.1;
  spec.reward.table[{{Cm, 0}, {T, 0}}] = 5.0;
  spec.reward.table[{{Cp, 0}, {Cp, 0}}] = 0.0;
  spec.reward.table[{{T, 0}, {T, 0}}] = 0.0;
  spec.validate();
  return spec;
}

BestInClassResult best_in_class_impl(const DrmdpSpec& spec, PolicyClassKind kind) {
  BestInClassResult best;
  best.kind = kind;
  bool have_best = false;

  if (kind == PolicyClassKind::PhaseIndexed) {
    struct Slot {
      StateId state;
      std::int32_t phase;
      std::int32_t num_actions;
    };
    std::vector<Slot> slots;
    std::int64_t combos = 1;
    for (StateId s = 0; s < spec.num_states(); ++s) {
      for (std::int32_t phase = 0; phase < spec.interval_law.max_n(); ++phase) {
        slots.push_back({s, phase, spec.num_actions(s)});
        combos *= spec.num_actions(s);
        if (combos > kEnumerationCap) {
          throw std::length_error("phase-policy enumeration exceeded the cap");
        }
      }
    }
    std::vector<std::int32_t> choice(slots.size(), 0);
    while (true) {
      PolicyS policy(spec);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        policy.set_deterministic(slots[i].state, slots[i].phase, choice[i]);
      }
      const double j = exact_return(spec, policy);
      if (!have_best || j > best.value) {
        best.value = j;
        best.policy = policy;
        have_best = true;
      }
      std::size_t i = 0;
      for (; i < slots.size(); ++i) {
        if (++choice[i] < slots[i].num_actions) break;
        choice[i] = 0;
      }
      if (i == slots.size()) break;
    }
    return best;
  }

  // History-indexed class: one row per reachable action point (history
  // segment, state).
  Feasibility feas(spec);
  std::set<PolicyTau::Key> points;
  for (const auto& start : feas.starts()) {
    points.insert({start.prefix, start.state});
  }
  for (const TrajectorySegment& seg : feas.segments(/*complete_only=*/false, kEnumerationCap)) {
    if (seg.current_len() >= spec.interval_law.max_n()) continue;
    const Step last = seg.last();
    for (const auto& [next_state, prob] : spec.transition[last.state][last.action]) {
      (void)prob;
      points.insert({seg, next_state});
    }
  }
  std::vector<PolicyTau::Key> keys(points.begin(), points.end());
  std::int64_t combos = 1;
  for (const auto& key : keys) {
    combos *= spec.num_actions(key.state);
    if (combos > kEnumerationCap) {
      throw std::length_error("history-policy enumeration exceeded the cap");
    }
  }
  std::vector<std::int32_t> choice(keys.size(), 0);
  while (true) {
    PolicyTau policy;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      policy.set_deterministic(keys[i], choice[i], spec.num_actions(keys[i].state));
    }
    const double j = exact_return(spec, policy);
    if (!have_best || j > best.value) {
      best.value = j;
      best.policy = policy;
      have_best = true;
    }
    std::size_t i = 0;
    for (; i < keys.size(); ++i) {
      if (++choice[i] < spec.num_actions(keys[i].state)) break;
      choice[i] = 0;
    }
    if (i == keys.size()) break;
  }
  return best;
}

PolicyS a1_mixture_policy(const DrmdpSpec& spec, double p) {
  PolicyS policy(spec);
  const StateId A = spec.state_id("A");
  for (std::int32_t phase = 0; phase < spec.interval_law.max_n(); ++phase) {
    policy.set_row(A, phase, {1.0 - p, p});
  }
  return policy;
}

}  // namespace

const char* fixture_name_string(FixtureName name) {
  switch (name) {
    case FixtureName::XorPolicyClass:
      return "XorPolicyClass";
    case FixtureName::FixedPointBias:
      return "FixedPointBias";
    case FixtureName::OptimalNotInPiS:
      return "OptimalNotInPiS";
  }
  throw std::invalid_argument("unknown fixture name");
}

FixtureName fixture_name_from_string(const std::string& name) {
  if (name == "XorPolicyClass") return FixtureName::XorPolicyClass;
  if (name == "FixedPointBias") return FixtureName::FixedPointBias;
  if (name == "OptimalNotInPiS") return FixtureName::OptimalNotInPiS;
  throw std::invalid_argument("unknown fixture name: " + name);
}

NamedFixture build_fixture(FixtureName name, double gamma) {
  NamedFixture fixture;
  fixture.name = name;
  const double g = gamma;
  switch (name) {
    case FixtureName::XorPolicyClass: {
      fixture.spec = xor_policy_class_spec(g);
      fixture.expected["best_history_return"] = {
          g, "one rewarded interval, reward 1 achievable on both routes, paid at step 1"};
      fixture.expected["best_phase_return"] = {
          0.5 * g, "a phase policy wins the interval on exactly one of the two equal routes"};
      fixture.computed["best_history_return"] =
          best_in_class_impl(fixture.spec, PolicyClassKind::HistoryIndexed).value;
      fixture.computed["best_phase_return"] =
          best_in_class_impl(fixture.spec, PolicyClassKind::PhaseIndexed).value;
      break;
    }
    case FixtureName::FixedPointBias: {
      fixture.spec = fixed_point_bias_spec(g);
      fixture.expected["vanilla_final_return"] = {
          -0.495 * g, "greedy per-step iteration settles on a_0: 0.5*(0.01 - 1) * gamma"};
      fixture.expected["trajectory_final_return"] = {
          0.0, "trajectory policy iteration reaches a_1: 0.5*(1 - 1) * gamma"};
      fixture.expected["best_phase_return"] = {0.0, "exhaustive phase-policy enumeration"};
      fixture.expected["q_c_c"] = {0.01, "single history: interval pays 0.01 at its last step"};
      fixture.expected["q_a_a0"] = {0.01 * g, "bootstraps one step into q_c_c"};
      fixture.expected["q_a1_p1"] = {
          0.0, "the two histories into (D, d) carry targets +1 and -1 with equal weight"};
      fixture.expected["q_a1_p0"] = {
          -g, "with a_1 never taken, the minimal-exploration history bucket is the B route"};
      fixture.expected["q_a1_p05"] = {
          -g / 3.0,
          "history-conditional mean: (0.5*0.5*1 + 0.5*(-1)) / (0.5*0.5 + 0.5) = -1/3, then one "
          "discount step"};

      const PolicyS uniform = PolicyS::uniform(fixture.spec);
      fixture.computed["vanilla_final_return"] =
          vanilla_iteration(fixture.spec, uniform).returns.back();
      fixture.computed["trajectory_final_return"] =
          policy_iteration(fixture.spec, uniform).returns.back();
      fixture.computed["best_phase_return"] =
          best_in_class_impl(fixture.spec, PolicyClassKind::PhaseIndexed).value;
      const StateId A = fixture.spec.state_id("A");
      const StateId C = fixture.spec.state_id("C");
      const StateQTable q_mid =
          vanilla_q_fixed_point(fixture.spec, a1_mixture_policy(fixture.spec, 0.5));
      fixture.computed["q_c_c"] = q_mid.value(C, 0);
      fixture.computed["q_a_a0"] = q_mid.value(A, 0);
      fixture.computed["q_a1_p05"] = q_mid.value(A, 1);
      fixture.computed["q_a1_p0"] =
          vanilla_q_fixed_point(fixture.spec, a1_mixture_policy(fixture.spec, 0.0)).value(A, 1);
      fixture.computed["q_a1_p1"] =
          vanilla_q_fixed_point(fixture.spec, a1_mixture_policy(fixture.spec, 1.0)).value(A, 1);
      break;
    }
    case FixtureName::OptimalNotInPiS: {
      fixture.spec = optimal_not_in_pi_s_spec(g);
      fixture.expected["best_history_return"] = {
          4.95 * g + 2.5 * g * g * g,
          "take +1 after the big route (10 at step 1) and -1 after the small one (-0.1 at step "
          "1, then 5 at step 3)"};
      fixture.expected["best_phase_return"] = {
          5.05 * g, "the sign choice at B is shared: +1 pays 0.5*10 + 0.5*0.1 at step 1"};
      fixture.computed["best_history_return"] =
          best_in_class_impl(fixture.spec, PolicyClassKind::HistoryIndexed).value;
      fixture.computed["best_phase_return"] =
          best_in_class_impl(fixture.spec, PolicyClassKind::PhaseIndexed).value;
      break;
    }
  }

  for (const auto& [key, expected] : fixture.expected) {
    const double got = fixture.computed.at(key);
    if (std::abs(got - expected.value) > 1e-9) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "fixture " << fixture_name_string(name) << " failed self-verification: " << key
          << " expected " << expected.value << " got " << got;
      throw std::runtime_error(msg.str());
    }
  }
  return fixture;
}

BestInClassResult best_in_class(const NamedFixture& fixture, PolicyClassKind kind) {
  return best_in_class_impl(fixture.spec, kind);
}

FixedPointBiasReport reproduce_fixed_point_bias(double gamma) {
  const DrmdpSpec spec = fixed_point_bias_spec(gamma);
  FixedPointBiasReport report;
  report.gamma = gamma;
  report.vanilla_final_return = vanilla_iteration(spec, PolicyS::uniform(spec)).returns.back();
  report.trajectory_final_return =
      policy_iteration(spec, PolicyS::uniform(spec)).returns.back();

  const StateId A = spec.state_id("A");
  const VanillaIterationResult from_optimal =
      vanilla_iteration(spec, a1_mixture_policy(spec, 1.0));
  report.vanilla_flips_optimal_init =
      from_optimal.converged && from_optimal.policies.back().prob(A, 0, 1) < 0.5;

  const double ps[3] = {0.0, 0.5, 1.0};
  for (int i = 0; i < 3; ++i) {
    report.q_a1_at_p[i] = vanilla_q_fixed_point(spec, a1_mixture_policy(spec, ps[i])).value(A, 1);
  }
  return report;
}

}  // namespace drlab
