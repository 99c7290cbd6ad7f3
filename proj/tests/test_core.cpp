#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "drlab/core/analysis.hpp"
#include "drlab/core/feasibility.hpp"
#include "drlab/core/policy.hpp"
#include "drlab/core/rng.hpp"
#include "drlab/core/sampling.hpp"
#include "drlab/core/serialize.hpp"
#include "test_specs.hpp"

using namespace drlab;
using drlab_test::chain;
using drlab_test::diamond;
using drlab_test::merging_paths_sum;
using drlab_test::two_cycle;
using drlab_test::xor_two_path;

TEST_CASE("interval law: point mass") {
  auto law = IntervalLaw::fixed(3);
  CHECK(law.max_n() == 3);
  CHECK(law.pmf(3) == 1.0);
  CHECK(law.pmf(2) == 0.0);
  CHECK(law.hazard(1) == 0.0);
  CHECK(law.hazard(2) == 0.0);
  CHECK(law.hazard(3) == 1.0);
}

TEST_CASE("interval law: hazard values on a gapped support") {
  // P(n=1)=0.25 leaves survival 0.75; length 2 is off support, so its
  // conditional end probability is 0; at the maximum it must be 1.
  IntervalLaw law({1, 3}, {0.25, 0.75});
  CHECK(law.hazard(1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(law.hazard(2) == 0.0);
  CHECK(law.hazard(3) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("interval law: pmf reconstructs from hazards within 1e-12") {
  IntervalLaw law({1, 2, 3}, {0.2, 0.3, 0.5});
  double survival = 1.0;
  for (std::int32_t k = 1; k <= 3; ++k) {
    const double q = survival * law.hazard(k);
    CHECK(std::abs(q - law.pmf(k)) <= 1e-12);
    survival -= q;
  }
  CHECK(std::abs(survival) <= 1e-12);
}

TEST_CASE("interval law: constructor validation") {
  CHECK_THROWS_AS(IntervalLaw({1, 2}, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalLaw({0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalLaw({2, 2}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalLaw({1, 2}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalLaw({1}, {-1.0}), std::invalid_argument);
}

TEST_CASE("interval law: inverse-CDF sampling") {
  IntervalLaw law({1, 2, 3}, {0.2, 0.3, 0.5});
  CHECK(law.sample_from_uniform(0.0) == 1);
  CHECK(law.sample_from_uniform(0.1999) == 1);
  CHECK(law.sample_from_uniform(0.2001) == 2);
  CHECK(law.sample_from_uniform(0.4999) == 2);
  CHECK(law.sample_from_uniform(0.5001) == 3);
  CHECK(law.sample_from_uniform(0.9999) == 3);
}

namespace {

TrajectorySegment seg_of(std::vector<Step> steps, std::int32_t prefix = 0) {
  return TrajectorySegment{std::move(steps), prefix};
}

}  // namespace

TEST_CASE("interval reward: sum of per-step rewards") {
  auto spec = chain(3, 3);  // per-step rewards 1, 2, 3 along the chain
  const double r = evaluate_reward(spec, seg_of({{0, 0}, {1, 0}, {2, 0}}));
  CHECK(r == 6.0);
}

TEST_CASE("interval reward: max form scales the best step by 10") {
  auto spec = diamond(RewardKind::Max, 0.1, 0.0, 0.5, 0.2);
  // Steps (A,u)=0.1 and (B,w)=0.5: the best per-step reward is 0.5.
  CHECK(evaluate_reward(spec, seg_of({{0, 0}, {1, 0}})) == 5.0);
  // Steps (A,u)=0.1 and (B,x)=0.2.
  CHECK(evaluate_reward(spec, seg_of({{0, 0}, {1, 1}})) == 2.0);
}

TEST_CASE("interval reward: square form is linear inside the unit band") {
  auto spec = diamond(RewardKind::Square, 2.0, 0.5, 2.0, 0.5);
  // Average of (2, 2) is 2: outside the band, so 4 * sign * avg^2 = 16.
  CHECK(evaluate_reward(spec, seg_of({{0, 0}, {1, 0}})) == 16.0);
  // Average of (0.5, 0.5) is 0.5: inside the band, so 4 * avg = 2.
  CHECK(evaluate_reward(spec, seg_of({{0, 1}, {1, 1}})) == 2.0);
  // Average of (2, 0.5) is 1.25: 4 * 1.25^2 = 6.25.
  CHECK(evaluate_reward(spec, seg_of({{0, 0}, {1, 1}})) == 6.25);
}

TEST_CASE("interval reward: weighted sum applies slot weights") {
  auto spec = diamond(RewardKind::WeightedSum, 2.0, 0.0, 4.0, 0.0);
  // Weights (1, 0.5) over steps (2, 4): 1*2 + 0.5*4 = 4.
  CHECK(evaluate_reward(spec, seg_of({{0, 0}, {1, 0}})) == 4.0);
}

TEST_CASE("interval reward: overlapped sum shifts the window back") {
  // With one slot of overlap the sum covers the prefix slot and the first
  // interval step, not the interval's final step.
  auto spec = two_cycle(2, 1);  // per-step rewards P=1, Q=0.5
  // Prefix (Q,q), interval steps (P,p), (Q,q): window = 0.5 + 1.
  const double r = evaluate_reward(spec, seg_of({{1, 0}, {0, 0}, {1, 0}}, 1));
  CHECK(r == 1.5);
  // A padding prefix contributes zero: window = 0 + 1.
  const double r0 = evaluate_reward(
      spec, seg_of({{kPaddingState, kPaddingAction}, {0, 0}, {1, 0}}, 1));
  CHECK(r0 == 1.0);
}

TEST_CASE("interval reward: errors") {
  auto spec = xor_two_path();
  // Length 1 is not a supported interval length (the law is fixed at 2).
  CHECK_THROWS_AS(evaluate_reward(spec, seg_of({{0, 0}})), std::invalid_argument);
  // Feasible-looking but unlisted tabulated segment.
  spec.reward.table.erase(spec.reward.table.begin());
  CHECK_THROWS_AS(evaluate_reward(spec, seg_of({{0, 0}, {2, 0}})), std::out_of_range);
  // Truncated evaluation reports the gap instead of throwing.
  CHECK_FALSE(evaluate_reward_truncated(spec, seg_of({{0, 0}})).has_value());
}

TEST_CASE("discounted return: rewards land on interval-final steps") {
  EpisodeTrace trace;
  trace.intervals.push_back({{}, 2, 1.0, false, true});
  trace.intervals.push_back({{}, 2, 5.0, false, true});
  // First reward at step 1, second at step 3: 0.5^1 * 1 + 0.5^3 * 5.
  CHECK(discounted_return(trace, 0.5) == doctest::Approx(1.125).epsilon(1e-15));
  CHECK(discounted_return({}, 0.5) == 0.0);
}

TEST_CASE("feasibility: interval starts respect boundary times") {
  auto spec = xor_two_path();
  Feasibility feas(spec);
  // Starts happen at steps 0, 2, 4, ...; the middle state only occurs at
  // odd steps, so it can never begin an interval.
  CHECK(feas.can_start_interval(spec.state_id("A0")));
  CHECK(feas.can_start_interval(spec.state_id("A1")));
  CHECK(feas.can_start_interval(spec.state_id("C")));
  CHECK_FALSE(feas.can_start_interval(spec.state_id("B")));

  auto complete = feas.segments(/*complete_only=*/true, 1 << 20);
  // Two middle actions per first state, plus the absorbing self-loop.
  CHECK(complete.size() == 5);
  for (const auto& seg : complete) {
    CHECK(seg.current_len() == 2);
    CHECK(seg.prefix_len == 0);
  }
}

TEST_CASE("feasibility: all partial segments when not complete-only") {
  auto spec = xor_two_path();
  Feasibility feas(spec);
  auto all = feas.segments(/*complete_only=*/false, 1 << 20);
  // Length-1 segments: (A0,a0), (A1,a1), (C,end); length-2: the five
  // complete ones.
  CHECK(all.size() == 8);
}

TEST_CASE("feasibility: overlap prefixes cover padding and realized steps") {
  auto spec = two_cycle(1, 1);
  Feasibility feas(spec);
  // Interval starts: step 0 in P behind a padding slot, and every later
  // step behind the single realized predecessor step.
  REQUIRE(feas.starts().size() == 3);
  std::set<std::vector<Step>> prefixes;
  for (const auto& start : feas.starts()) {
    prefixes.insert(start.prefix.steps);
  }
  CHECK(prefixes.count({{kPaddingState, kPaddingAction}}) == 1);
  CHECK(prefixes.count({{0, 0}}) == 1);  // (P,p) before an interval at Q
  CHECK(prefixes.count({{1, 0}}) == 1);  // (Q,q) before an interval at P

  auto complete = feas.segments(/*complete_only=*/true, 1 << 20);
  CHECK(complete.size() == 3);
}

TEST_CASE("past invariance: sum form holds") {
  auto report = check_pi_condition(merging_paths_sum(), 8);
  CHECK(report.holds);
  // Branching sum diamond produces genuine cross-history comparisons.
  auto report2 = check_pi_condition(diamond(RewardKind::Sum, 1, 2, 4, 8), 8);
  CHECK(report2.holds);
  CHECK(report2.comparisons > 0);
}

TEST_CASE("past invariance: xor reward violates with a concrete witness") {
  auto spec = xor_two_path();
  auto report = check_pi_condition(spec, 8);
  REQUIRE_FALSE(report.holds);
  REQUIRE(report.witness.has_value());
  const auto& w = *report.witness;
  // The two pasts are the two first-state steps; the continuations are the
  // two middle actions; rewards form the xor pattern {0,1} vs {1,0}.
  CHECK(w.past1.total_len() == 1);
  CHECK(w.past2.total_len() == 1);
  CHECK(w.cont1.size() == 1);
  CHECK(w.cont2.size() == 1);
  CHECK(w.r11 + w.r12 == 1.0);
  CHECK(w.r21 + w.r22 == 1.0);
  CHECK(w.r11 != w.r21);
  CHECK_FALSE(w.describe(spec).empty());
}

TEST_CASE("past invariance: max form can break ties asymmetrically") {
  // After the high first step (0.3) both middle actions are dominated, so
  // their rewards tie at 3; after the low first step they differ (2 vs 1).
  auto spec = diamond(RewardKind::Max, 0.3, 0.0, 0.2, 0.1);
  auto report = check_pi_condition(spec, 8);
  REQUIRE_FALSE(report.holds);
  const auto& w = *report.witness;
  CHECK(std::abs(w.r11 - w.r12) <= 1e-12);
  CHECK(std::abs(w.r21 - w.r22) > 1e-12);
}

TEST_CASE("past invariance: order can hold while differences drift") {
  // Max form with first steps 0.15 / 0: orders agree (2 > 1.5 and 2 > 1)
  // but the differences are 0.5 vs 1, so only the strong form fails.
  auto spec = diamond(RewardKind::Max, 0.15, 0.0, 0.2, 0.1);
  CHECK(check_pi_condition(spec, 8).holds);
  auto strong = check_strong_pi_condition(spec, 8);
  REQUIRE_FALSE(strong.holds);
  CHECK(std::abs((strong.witness->r11 - strong.witness->r12) -
                 (strong.witness->r21 - strong.witness->r22)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("past invariance: weighted sums satisfy the strong form") {
  auto spec = diamond(RewardKind::WeightedSum, 1, 2, 4, 8);
  auto strong = check_strong_pi_condition(spec, 8);
  CHECK(strong.holds);
  CHECK(strong.comparisons > 0);
  // Plain sums cancel shared pasts exactly as well.
  CHECK(check_strong_pi_condition(diamond(RewardKind::Sum, 1, 2, 4, 8), 8).holds);
}

TEST_CASE("past invariance: enumeration cap") {
  CHECK_THROWS_AS(check_pi_condition(xor_two_path(), 8, 2), std::length_error);
}

TEST_CASE("absorbing-state detection") {
  auto spec = merging_paths_sum();
  CHECK(spec.zero_reward_absorbing(spec.state_id("C0")));
  CHECK(spec.zero_reward_absorbing(spec.state_id("D0")));
  CHECK_FALSE(spec.zero_reward_absorbing(spec.state_id("A")));
  CHECK_FALSE(spec.zero_reward_absorbing(spec.state_id("C")));
  // A self-loop that pays is not a sink.
  auto paying = spec;
  paying.reward.step_reward[paying.state_id("C0")][0] = 2.0;
  CHECK_FALSE(paying.zero_reward_absorbing(paying.state_id("C0")));
}

TEST_CASE("spec validation rejects broken structures") {
  auto spec = merging_paths_sum();
  CHECK_NOTHROW(spec.validate());
  auto bad = spec;
  bad.transition[0][0][0].second = 0.5;  // row no longer sums to 1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.initial_dist[0].second = 0.7;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = spec;
  bad.reward.step_reward.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("phase policy: uniform construction and rows") {
  auto spec = xor_two_path();
  PolicyS pi(spec);
  CHECK(pi.num_phases() == 2);
  CHECK(pi.prob(spec.state_id("B"), 1, 0) == 0.5);
  CHECK(pi.prob(spec.state_id("A0"), 0, 0) == 1.0);
  pi.set_deterministic(spec.state_id("B"), 1, 1);
  CHECK(pi.prob(spec.state_id("B"), 1, 1) == 1.0);
  CHECK(pi.prob(spec.state_id("B"), 1, 0) == 0.0);
  CHECK_NOTHROW(pi.validate(spec));
  pi.set_row(spec.state_id("B"), 0, {0.9, 0.2});
  CHECK_THROWS_AS(pi.validate(spec), std::invalid_argument);
}

TEST_CASE("history policy: keys distinguish histories") {
  auto spec = xor_two_path();
  PolicyTau pi;
  const StateId b = spec.state_id("B");
  PolicyTau::Key after0{seg_of({{0, 0}}), b};
  PolicyTau::Key after1{seg_of({{1, 0}}), b};
  pi.set_deterministic(after0, 1, 2);
  pi.set_deterministic(after1, 0, 2);
  CHECK(pi.prob(after0, 1) == 1.0);
  CHECK(pi.prob(after1, 1) == 0.0);
  CHECK_FALSE(pi.defined(PolicyTau::Key{seg_of({}), b}));
  CHECK_THROWS_AS(pi.prob(PolicyTau::Key{seg_of({}), b}, 0), std::out_of_range);
}

TEST_CASE("episode sampling: deterministic process ignores the seed") {
  auto spec = chain(2, 1);
  PolicyS pi(spec);  // single action everywhere
  auto t1 = sample_episode(spec, pi, 1, 10);
  auto t2 = sample_episode(spec, pi, 99, 10);
  CHECK(t1 == t2);
  // Two one-step intervals with rewards 1 and 2, then the terminal stops
  // the episode at its interval start.
  REQUIRE(t1.intervals.size() == 2);
  CHECK(t1.intervals[0].reward == 1.0);
  CHECK(t1.intervals[1].reward == 2.0);
  CHECK_FALSE(t1.truncated_mid_interval);
  CHECK(discounted_return(t1, 0.5) == doctest::Approx(1.0 + 0.5 * 2.0));
}

TEST_CASE("episode sampling: fixed seed reproduces the trace exactly") {
  auto spec = xor_two_path();
  PolicyS pi(spec);
  auto t1 = sample_episode(spec, pi, 1234, 50);
  auto t2 = sample_episode(spec, pi, 1234, 50);
  CHECK(t1 == t2);
  for (const auto& iv : t1.intervals) {
    CHECK(iv.length == 2);  // point-mass interval law
    CHECK(iv.reward == evaluate_reward(spec, iv.segment));
  }
}

TEST_CASE("episode sampling: horizon truncation flags the last interval") {
  auto spec = two_cycle(2, 0);
  PolicyS pi(spec);
  auto trace = sample_episode(spec, pi, 7, 3);
  REQUIRE(trace.intervals.size() == 2);
  CHECK(trace.intervals[0].length == 2);
  CHECK(trace.intervals[0].reward == 1.5);  // P then Q: 1 + 0.5
  CHECK(trace.intervals[1].length == 1);
  CHECK(trace.intervals[1].truncated);
  CHECK(trace.intervals[1].reward_defined);
  CHECK(trace.intervals[1].reward == 1.0);  // the sum still evaluates
  CHECK(trace.truncated_mid_interval);
  CHECK(trace.total_steps() == 3);
}

TEST_CASE("episode sampling: history policy reads its keys") {
  auto spec = xor_two_path();
  PolicyTau pi;
  const StateId b = spec.state_id("B");
  // Start rows (single actions) plus the history-aware middle rows that
  // always pick the rewarding action.
  pi.set_deterministic({seg_of({}), spec.state_id("A0")}, 0, 1);
  pi.set_deterministic({seg_of({}), spec.state_id("A1")}, 0, 1);
  pi.set_deterministic({seg_of({{0, 0}}), b}, 1, 2);
  pi.set_deterministic({seg_of({{1, 0}}), b}, 0, 2);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto trace = sample_episode(spec, pi, seed, 50);
    REQUIRE(trace.intervals.size() == 1);
    CHECK(trace.intervals[0].reward == 1.0);
    CHECK(discounted_return(trace, spec.gamma) == doctest::Approx(spec.gamma));
  }
}

TEST_CASE("episode sampling: overlapped prefixes carry realized steps") {
  auto spec = two_cycle(2, 1);
  PolicyS pi(spec);
  auto trace = sample_episode(spec, pi, 3, 6);
  REQUIRE(trace.intervals.size() == 3);
  // First interval: padding prefix; later intervals carry the previous
  // interval's final step as their prefix.
  CHECK(trace.intervals[0].segment.steps[0].is_padding());
  CHECK(trace.intervals[1].segment.steps[0] == trace.intervals[0].segment.steps.back());
  CHECK(trace.intervals[2].segment.steps[0] == trace.intervals[1].segment.steps.back());
  for (const auto& iv : trace.intervals) {
    CHECK(iv.segment.prefix_len == 1);
    CHECK(iv.reward == evaluate_reward(spec, iv.segment));
  }
}

TEST_CASE("rng: determinism and ranges") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  Rng c(42);
  CHECK(c.fork().raw() != Rng(42).raw());
  Rng d(7);
  for (int i = 0; i < 50; ++i) {
    CHECK(d.categorical({0.0, 1.0, 0.0}) == 1);
    const auto k = d.below(4);
    CHECK(k >= 0);
    CHECK(k < 4);
  }
}

TEST_CASE("serialization: exact decimal round-trip") {
  for (double v : {0.1, 0.3, 1.0 / 3.0, 1e-12, 123456.789, 0.1 + 0.2, -0.49005,
                   0.123456789012345, 1.0, -2.5e-7}) {
    const auto text = format_double(v);
    CHECK(std::strtod(text.c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(-0.25) == "-0.25");
}

TEST_CASE("serialization: spec round-trips through text") {
  for (const auto& spec :
       {xor_two_path(), merging_paths_sum(0.97),
        diamond(RewardKind::WeightedSum, 0.1, 0.2, 0.3, 0.4), two_cycle(2, 1)}) {
    const auto text = save_spec(spec);
    const auto parsed = parse_spec(text);
    CHECK(save_spec(parsed) == text);
    CHECK(parsed.gamma == spec.gamma);
    CHECK(parsed.overlap_c == spec.overlap_c);
    CHECK(parsed.reward.kind == spec.reward.kind);
    CHECK(parsed.reward.table == spec.reward.table);
    CHECK(parsed.reward.step_reward == spec.reward.step_reward);
    CHECK(parsed.transition == spec.transition);
    CHECK(parsed.initial_dist == spec.initial_dist);
    CHECK(parsed.interval_law == spec.interval_law);
  }
}

TEST_CASE("serialization: parse failures carry line numbers") {
  CHECK_THROWS_AS(parse_spec(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_spec("not a spec\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_spec("drmdp-spec v1\n[bogus]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_spec("drmdp-spec v1\nstray line\n"), std::invalid_argument);

  const auto base = save_spec(xor_two_path());
  // Unknown state in a transition line.
  auto broken = base;
  broken.replace(broken.find("A0 a0 B 1"), 9, "A9 a0 B 1");
  CHECK_THROWS_AS(parse_spec(broken), std::invalid_argument);
  // Unknown reward directive.
  CHECK_THROWS_AS(parse_spec(base + "mystery 1\n"), std::invalid_argument);
  // Non-stochastic row caught by validation.
  auto skewed = base;
  skewed.replace(skewed.find("A0 a0 B 1"), 9, "A0 a0 B 0.5");
  CHECK_THROWS_AS(parse_spec(skewed), std::invalid_argument);
}

TEST_CASE("serialization: comments and blank lines are ignored") {
  auto text = save_spec(two_cycle(1, 0));
  text.insert(text.find("[states]"), "# a comment\n\n");
  auto parsed = parse_spec(text + "\n# trailing\n");
  CHECK(save_spec(parsed) == save_spec(two_cycle(1, 0)));
}
