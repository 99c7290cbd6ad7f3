#pragma once

#include <array>
#include <map>
#include <string>
#include <variant>

#include "drlab/core/policy.hpp"
#include "drlab/core/spec.hpp"

namespace drlab {

// The three hand-constructed processes that exhibit the phenomena the
// engine exists to measure:
//
//  XorPolicyClass   phase policies cannot express the optimal behavior:
//                   the rewarding second action is the XOR of a first
//                   step the phase index forgets;
//  FixedPointBias   the per-step critic's fixed point misranks the first
//                   action even from on-policy data, so greedy iteration
//                   converges to the bad action;
//  OptimalNotInPiS  past-invariance holds but only in the weak (ordering)
//                   sense, and the optimal policy still needs history.
enum class FixtureName { XorPolicyClass, FixedPointBias, OptimalNotInPiS };

const char* fixture_name_string(FixtureName name);
FixtureName fixture_name_from_string(const std::string& name);

// One named quantity of a fixture: its frozen value and a one-line note
// on how the value is obtained independently of the engine.
struct ExpectedValue {
  double value = 0.0;
  std::string basis;
};

struct NamedFixture {
  FixtureName name = FixtureName::XorPolicyClass;
  DrmdpSpec spec;
  std::map<std::string, ExpectedValue> expected;
  std::map<std::string, double> computed;  // engine re-derivations, same keys
};

// Builds the named process and re-derives every expected quantity with
// the engine; a disagreement beyond 1e-9 throws std::runtime_error. The
// discount is a parameter because several frozen values are symbolic in
// it.
NamedFixture build_fixture(FixtureName name, double gamma = 0.99);

enum class PolicyClassKind { PhaseIndexed, HistoryIndexed };

struct BestInClassResult {
  double value = 0.0;
  PolicyClassKind kind = PolicyClassKind::PhaseIndexed;
  std::variant<PolicyS, PolicyTau> policy;
};

// Exhaustively enumerates deterministic policies of the class (phase
// rows, or rows at every reachable history action point) and returns one
// with the largest exact expected discounted return. Throws
// std::length_error when the enumeration exceeds an internal cap.
BestInClassResult best_in_class(const NamedFixture& fixture, PolicyClassKind kind);

// Head-to-head run on the fixed-point-bias process: greedy iteration on
// the per-step critic's fixed point versus policy iteration on trajectory
// values, from several initial policies, plus the per-step critic's value
// of the misranked first action across data policies.
struct FixedPointBiasReport {
  double gamma = 0.0;
  double vanilla_final_return = 0.0;     // greedy per-step iteration, from uniform
  double trajectory_final_return = 0.0;  // trajectory policy iteration, from uniform
  bool vanilla_flips_optimal_init = false;  // starting optimal still ends sub-optimal
  // Per-step critic's Q(A, a_1) when the data policy takes a_1 with
  // probability p in {0, 0.5, 1}.
  std::array<double, 3> q_a1_at_p{};
};

FixedPointBiasReport reproduce_fixed_point_bias(double gamma = 0.99);

}  // namespace drlab
