#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include "doctest.h"
#include "drlab/core/analysis.hpp"
#include "drlab/core/policy.hpp"
#include "drlab/fixtures/fixtures.hpp"
#include "drlab/tabular/engine.hpp"

using namespace drlab;

TEST_CASE("fixture names round-trip") {
  for (const FixtureName name : {FixtureName::XorPolicyClass, FixtureName::FixedPointBias,
                                 FixtureName::OptimalNotInPiS}) {
    CHECK(fixture_name_from_string(fixture_name_string(name)) == name);
  }
  CHECK_THROWS_AS(fixture_name_from_string("no-such-fixture"), std::invalid_argument);
}

TEST_CASE("every fixture re-derives its frozen values") {
  for (const double gamma : {0.99, 0.5}) {
    for (const FixtureName name : {FixtureName::XorPolicyClass, FixtureName::FixedPointBias,
                                   FixtureName::OptimalNotInPiS}) {
      const NamedFixture f = build_fixture(name, gamma);
      CHECK(!f.expected.empty());
      for (const auto& [key, expected] : f.expected) {
        REQUIRE(f.computed.count(key) == 1);
        CHECK(std::abs(f.computed.at(key) - expected.value) <= 1e-9);
        CHECK(!expected.basis.empty());
      }
    }
  }
}

TEST_CASE("xor fixture: history policies strictly beat phase policies") {
  const double g = 0.99;
  const NamedFixture f = build_fixture(FixtureName::XorPolicyClass, g);

  // The reward orderings flip across pasts, so the brute-force invariance
  // check must reject this process with a concrete witness.
  const auto pi_report =
      check_pi_condition(f.spec, f.spec.overlap_c + f.spec.interval_law.max_n());
  CHECK(!pi_report.holds);
  REQUIRE(pi_report.witness.has_value());
  CHECK(!pi_report.witness->describe(f.spec).empty());

  // Reading one step of history earns the reward on both routes; phase
  // policies only ever earn it on one. Both values are exact binary
  // fractions times gamma, so the comparison is exact.
  const auto best_history = best_in_class(f, PolicyClassKind::HistoryIndexed);
  const auto best_phase = best_in_class(f, PolicyClassKind::PhaseIndexed);
  CHECK(best_history.value == g);
  CHECK(best_phase.value == 0.5 * g);
  CHECK(std::holds_alternative<PolicyTau>(best_history.policy));
  CHECK(std::holds_alternative<PolicyS>(best_phase.policy));

  CHECK(f.expected.at("best_history_return").value == g);
  CHECK(f.expected.at("best_phase_return").value == 0.5 * g);
}

TEST_CASE("fixed-point-bias fixture: the naive critic loses, trajectory values win") {
  const double g = 0.99;
  const FixedPointBiasReport report = reproduce_fixed_point_bias(g);
  CHECK(report.gamma == g);

  // Greedy iteration on the per-step critic lands on the poor first
  // action; trajectory policy iteration recovers the optimum.
  CHECK(std::abs(report.vanilla_final_return - (-0.495 * g)) <= 1e-10);
  CHECK(std::abs(report.trajectory_final_return - 0.0) <= 1e-10);
  CHECK(report.vanilla_flips_optimal_init);

  // The critic's value of the good first action as a function of how
  // often the data policy takes it: the merge state drags it negative
  // whenever the poor route shares the merge.
  CHECK(std::abs(report.q_a1_at_p[0] - (-g)) <= 1e-12);
  CHECK(std::abs(report.q_a1_at_p[1] - (-g / 3.0)) <= 1e-12);
  CHECK(std::abs(report.q_a1_at_p[2] - 0.0) <= 1e-12);

  const NamedFixture f = build_fixture(FixtureName::FixedPointBias, g);
  CHECK(std::abs(f.expected.at("vanilla_final_return").value - (-0.495 * g)) <= 1e-12);
  CHECK(std::abs(f.expected.at("trajectory_final_return").value) <= 1e-12);
  CHECK(std::abs(f.expected.at("best_phase_return").value) <= 1e-12);
}

TEST_CASE("ordering-invariant fixture: optimum still needs history") {
  const double g = 0.99;
  const NamedFixture f = build_fixture(FixtureName::OptimalNotInPiS, g);

  // Action orderings agree across pasts...
  const std::int32_t len = f.spec.overlap_c + f.spec.interval_law.max_n();
  CHECK(check_pi_condition(f.spec, len).holds);
  // ...but the reward differences do not, so the strong (difference)
  // form fails.
  const auto strong = check_strong_pi_condition(f.spec, len);
  CHECK(!strong.holds);
  REQUIRE(strong.witness.has_value());

  const auto best_history = best_in_class(f, PolicyClassKind::HistoryIndexed);
  const auto best_phase = best_in_class(f, PolicyClassKind::PhaseIndexed);
  const double expect_history = 4.95 * g + 2.5 * g * g * g;
  const double expect_phase = 5.05 * g;
  CHECK(std::abs(best_history.value - expect_history) <= 1e-9);
  CHECK(std::abs(best_phase.value - expect_phase) <= 1e-9);
  CHECK(best_history.value > best_phase.value + 1.0);
}
