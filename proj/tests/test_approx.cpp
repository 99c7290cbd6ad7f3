#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "drlab/approx/hc.hpp"
#include "drlab/approx/mlp.hpp"
#include "drlab/approx/records.hpp"
#include "drlab/approx/snapshot.hpp"
#include "drlab/core/rng.hpp"

using namespace drlab;

namespace {

StepFeatures step(std::vector<double> state, std::vector<double> action) {
  return {std::move(state), std::move(action), false};
}

StepFeatures pad_step() {
  StepFeatures p;
  p.padding = true;
  return p;
}

ReplayRecord make_record(SegmentFeatures segment, double reward, bool interval_end,
                         std::vector<double> next_state, bool next_terminal) {
  ReplayRecord record;
  record.phase = segment.current_len() - 1;
  record.segment = std::move(segment);
  record.reward = reward;
  record.interval_end = interval_end;
  record.next_state = std::move(next_state);
  record.next_terminal = next_terminal;
  return record;
}

bool same_bits(double a, double b) {
  std::uint64_t x = 0, y = 0;
  std::memcpy(&x, &a, 8);
  std::memcpy(&y, &b, 8);
  return x == y;
}

}  // namespace

// ---------------------------------------------------------------------------
// Fully connected nets

TEST_CASE("net descriptors name the architecture") {
  MlpSpec spec;
  spec.input_dim = 5;
  spec.hidden = {64, 64};
  spec.output_dim = 1;
  spec.tanh_output = true;
  CHECK(spec.describe() == "mlp in=5 hidden=64,64 out=1 act=tanh");
  spec.hidden = {};
  spec.tanh_output = false;
  CHECK(spec.describe() == "mlp in=5 hidden=- out=1 act=linear");
}

TEST_CASE("an affine net computes exact values and gradients") {
  Rng rng(7);
  MlpSpec spec;
  spec.input_dim = 2;
  spec.output_dim = 1;
  Mlp net(spec, rng);
  net.parameters() = {2.0, -3.0, 0.5};  // w0, w1, bias
  CHECK(net.forward_scalar({1.5, 0.25}) == 2.0 * 1.5 + (-3.0) * 0.25 + 0.5);

  const Mlp::Backprop bp = net.backward({1.5, 0.25}, {2.0});
  CHECK(bp.output[0] == net.forward_scalar({1.5, 0.25}));
  CHECK(bp.wrt_params[0] == 2.0 * 1.5);   // d/dw0 = x0 * seed
  CHECK(bp.wrt_params[1] == 2.0 * 0.25);  // d/dw1 = x1 * seed
  CHECK(bp.wrt_params[2] == 2.0);         // d/db = seed
  CHECK(bp.wrt_input[0] == 2.0 * 2.0);    // d/dx0 = w0 * seed
  CHECK(bp.wrt_input[1] == 2.0 * -3.0);
  CHECK(net.final_layer_offset() == 0);
  CHECK(net.final_layer_count() == 3);
}

TEST_CASE("net gradients match central differences across architectures") {
  struct Variant {
    std::int32_t in;
    std::vector<std::int32_t> hidden;
    std::int32_t out;
    bool tanh;
    std::uint64_t seed;
  };
  const std::vector<Variant> variants = {
      {2, {}, 1, false, 11},     {3, {8}, 1, false, 12},  {4, {16, 16}, 1, true, 13},
      {5, {12}, 3, true, 14},    {6, {10, 10}, 2, false, 15},
  };
  for (const Variant& v : variants) {
    CAPTURE(v.seed);
    Rng rng(v.seed);
    MlpSpec spec;
    spec.input_dim = v.in;
    spec.hidden = v.hidden;
    spec.output_dim = v.out;
    spec.tanh_output = v.tanh;
    Mlp net(spec, rng);
    const FdReport report = fd_check_mlp(net, rng, 100);
    CHECK(report.points == 100);
    CHECK(report.max_rel_error < 1e-5);
  }
}

TEST_CASE("the optimizer minimizes a quadratic") {
  Adam opt(1, 0.1);
  std::vector<double> x = {-4.0};
  for (int i = 0; i < 800; ++i) {
    opt.step(x, {2.0 * (x[0] - 3.0)});
  }
  CHECK(std::abs(x[0] - 3.0) < 1e-3);
  CHECK(Adam(1).learning_rate() == 3e-4);
  CHECK_THROWS_AS(opt.step(x, {1.0, 2.0}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// History structures

TEST_CASE("the empty history has value exactly zero") {
  Rng rng(21);
  const HStructure h(HKind::Singleton, 0, 3, 8, 2, rng);
  CHECK(h.value({}) == 0.0);
  const HStructure hp(HKind::PairwiseK, 2, 3, 8, 1, rng);
  CHECK(hp.value({}) == 0.0);
}

TEST_CASE("a singleton structure is exactly additive step by step") {
  Rng rng(22);
  const HStructure h(HKind::Singleton, 0, 3, 8, 2, rng);
  const StepFeatures s1 = step({0.1, -0.4}, {0.7});
  const StepFeatures s2 = step({0.9, 0.2}, {-0.3});
  const StepFeatures s3 = step({-0.6, 0.5}, {0.05});
  const double base = h.value({s1, s2});
  const double extended = h.value({s1, s2, s3});
  const double term = h.nets()[0].forward_scalar({-0.6, 0.5, 0.05});
  CHECK(extended == base + term);  // same left-to-right accumulation
}

TEST_CASE("padding steps contribute nothing to any history structure") {
  Rng rng(23);
  const StepFeatures s1 = step({0.3, 0.3}, {-0.2});
  const StepFeatures s2 = step({-0.8, 0.1}, {0.6});
  for (const HKind kind : {HKind::Singleton, HKind::PairwiseK}) {
    const HStructure h(kind, 1, 3, 6, 1, rng);
    CHECK(same_bits(h.value({pad_step(), s1, pad_step(), s2}), h.value({s1, s2})));
  }
}

TEST_CASE("a pairwise structure sums hand-checkable single and pair terms") {
  Rng rng(24);
  HStructure h(HKind::PairwiseK, 2, 2, 0, 0, rng);  // three affine nets
  REQUIRE(h.nets().size() == 3);
  REQUIRE(h.parameter_count() == 3 + 5 + 5);
  // c0(x) = x[0]; c1(pair) = right[0]; c2(pair) = right[1] + 0.5.
  h.set_parameters({1, 0, 0,  0, 0, 1, 0, 0,  0, 0, 0, 1, 0.5});
  const std::vector<StepFeatures> steps = {step({1}, {11}), step({2}, {12}), step({3}, {13})};
  // Singles 1+2+3, distance-1 pairs 2+3, the distance-2 pair 13+0.5.
  CHECK(h.value(steps) == 24.5);
}

TEST_CASE("history gradients match central differences") {
  for (const HKind kind : {HKind::Singleton, HKind::PairwiseK}) {
    Rng rng(kind == HKind::Singleton ? 25 : 26);
    HStructure h(kind, 2, 3, 6, 2, rng);
    const std::vector<StepFeatures> steps = {step({0.2, -0.1}, {0.4}), step({0.5, 0.3}, {-0.6}),
                                             step({-0.2, 0.8}, {0.1}),
                                             step({0.6, -0.7}, {0.9})};
    std::vector<double> grad(static_cast<std::size_t>(h.parameter_count()), 0.0);
    const double value = h.value_backward(steps, 1.0, grad);
    CHECK(same_bits(value, h.value(steps)));

    const std::vector<double> saved = h.parameters();
    const double fd_step = 1e-6;
    for (int probe = 0; probe < 6; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(h.parameter_count()));
      std::vector<double> params = saved;
      params[idx] = saved[idx] + fd_step;
      h.set_parameters(params);
      const double up = h.value(steps);
      params[idx] = saved[idx] - fd_step;
      h.set_parameters(params);
      const double down = h.value(steps);
      h.set_parameters(saved);
      const double numeric = (up - down) / (2.0 * fd_step);
      const double scale = std::max({1.0, std::abs(grad[idx]), std::abs(numeric)});
      CHECK(std::abs(grad[idx] - numeric) / scale < 1e-5);
    }
  }
}

TEST_CASE("history structures reject malformed configurations") {
  Rng rng(27);
  CHECK_THROWS_AS(HStructure(HKind::Singleton, 0, 0, 8, 1, rng), std::invalid_argument);
  CHECK_THROWS_AS(HStructure(HKind::PairwiseK, 0, 3, 8, 1, rng), std::invalid_argument);
  HStructure h(HKind::Singleton, 0, 3, 8, 1, rng);
  CHECK_THROWS_AS(h.set_parameters({1.0, 2.0}), std::invalid_argument);
  std::vector<double> tiny(3, 0.0);
  CHECK_THROWS_AS(h.value_backward({}, 1.0, tiny), std::invalid_argument);
  CHECK_THROWS_AS(h.value({step({1.0}, {})}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Critics and the actor

TEST_CASE("the decomposed critic splits into history and current-step parts") {
  Rng rng(31);
  HcConfig config;
  config.kind = HKind::Singleton;
  config.state_dim = 2;
  config.action_dim = 2;
  config.width = 8;
  config.depth = 1;
  config.max_interval_len = 4;
  config.overlap = 1;
  HcCritic critic(config, rng);

  SegmentFeatures seg;
  seg.steps = {step({0.1, 0.2}, {0.3, -0.3}), step({0.4, -0.1}, {0.2, 0.6}),
               step({-0.5, 0.7}, {0.9, 0.1})};
  seg.prefix_len = 1;
  CHECK(critic.value(seg) == critic.h_value(seg) + critic.c_value(seg));

  // The phase input is the position inside the interval over its maximum
  // length: the segment above is at phase 2 of 4.
  CHECK(critic.phase_norm(0) == 0.0);
  CHECK(critic.phase_norm(2) == 0.5);
  const std::vector<double> input = critic.c_input({0.1, 0.2}, {0.3, 0.4}, 2);
  REQUIRE(input.size() == 5);
  CHECK(input[4] == 0.5);

  // Changing the final action cannot move the history part at all, so the
  // critic's action sensitivity is exactly the current-step part's.
  SegmentFeatures swapped = seg;
  swapped.steps.back().action = {-0.9, 0.4};
  CHECK(same_bits(critic.h_value(seg), critic.h_value(swapped)));
}

TEST_CASE("critic action gradients flow only through the current-step part") {
  Rng rng(32);
  HcConfig config;
  config.state_dim = 2;
  config.action_dim = 2;
  config.width = 6;
  config.depth = 2;
  config.max_interval_len = 3;
  HcCritic critic(config, rng);
  SegmentFeatures seg;
  seg.steps = {step({0.3, -0.2}, {0.1, 0.5}), step({0.6, 0.4}, {0.2, -0.7})};
  seg.prefix_len = 0;

  // Analytic d(critic)/d(action) via the current-step net alone.
  const std::vector<double> c_in = critic.c_input({0.6, 0.4}, {0.2, -0.7}, 1);
  const Mlp::Backprop bp = critic.c().backward(c_in, {1.0});

  // Central differences through the FULL critic value.
  const double fd_step = 1e-6;
  for (std::size_t d = 0; d < 2; ++d) {
    SegmentFeatures up = seg, down = seg;
    up.steps.back().action[d] += fd_step;
    down.steps.back().action[d] -= fd_step;
    const double numeric = (critic.value(up) - critic.value(down)) / (2.0 * fd_step);
    const double analytic = bp.wrt_input[2 + d];
    const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
    CHECK(std::abs(analytic - numeric) / scale < 1e-6);
  }
}

TEST_CASE("the actor maps state and phase to bounded actions") {
  Rng rng(33);
  const Actor actor(3, 2, 16, 2, rng);
  const std::vector<double> a = actor.act({0.2, -0.5, 0.9}, 0.25);
  REQUIRE(a.size() == 2);
  for (const double x : a) CHECK(std::abs(x) < 1.0);
  CHECK_THROWS_AS(actor.act({0.2, -0.5}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Actor(0, 2, 8, 1, rng), std::invalid_argument);
}

TEST_CASE("target copies start equal to the live nets and blend by tau") {
  Rng rng(34);
  HcConfig config;
  config.state_dim = 2;
  config.action_dim = 1;
  config.width = 4;
  config.depth = 1;
  config.max_interval_len = 2;
  HcCritic critic(config, rng);
  CHECK(critic.h().parameters() == critic.h_target().parameters());
  CHECK(critic.c().parameters() == critic.c_target().parameters());

  // Move the live nets, then blend.
  for (double& p : critic.c().parameters()) p += 1.0;
  const std::vector<double> live = critic.c().parameters();
  const std::vector<double> old_target = critic.c_target().parameters();
  critic.soft_update_targets(0.25);
  for (std::size_t i = 0; i < live.size(); ++i) {
    CHECK(critic.c_target().parameters()[i] == 0.25 * live[i] + 0.75 * old_target[i]);
  }
  // A full-weight update copies the live parameters outright.
  critic.soft_update_targets(1.0);
  CHECK(critic.c_target().parameters() == critic.c().parameters());
  // Equal live and target parameters are a fixed point up to roundoff.
  critic.soft_update_targets(0.005);
  for (std::size_t i = 0; i < live.size(); ++i) {
    CHECK(std::abs(critic.c_target().parameters()[i] - live[i]) <=
          1e-12 * (1.0 + std::abs(live[i])));
  }
  CHECK_THROWS_AS(critic.soft_update_targets(0.0), std::invalid_argument);
  CHECK_THROWS_AS(critic.soft_update_targets(1.5), std::invalid_argument);
}

TEST_CASE("critic parameter vectors round-trip through the flat layout") {
  Rng rng(35);
  HcConfig config;
  config.kind = HKind::PairwiseK;
  config.pair_span = 1;
  config.state_dim = 2;
  config.action_dim = 1;
  config.width = 4;
  config.depth = 1;
  config.max_interval_len = 3;
  HcCritic critic(config, rng);
  std::vector<double> flat = critic.parameters();
  REQUIRE(static_cast<std::int64_t>(flat.size()) == critic.parameter_count());
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = 0.001 * static_cast<double>(i);
  critic.set_parameters(flat);
  CHECK(critic.parameters() == flat);
  flat.pop_back();
  CHECK_THROWS_AS(critic.set_parameters(flat), std::invalid_argument);
}

TEST_CASE("the comparison critic lays segments out right-aligned with validity flags") {
  Rng rng(36);
  const MonolithicCritic critic(1, 2, 1, 1, 4, 1, rng);  // 3 slots, 1+1 features
  CHECK(critic.slots() == 3);
  SegmentFeatures seg;
  seg.steps = {step({7}, {8}), step({9}, {10})};
  seg.prefix_len = 1;
  const std::vector<double> f = critic.featurize(seg);
  CHECK(f == std::vector<double>{0, 0, 0, 7, 8, 1, 9, 10, 1});

  SegmentFeatures padded;
  padded.steps = {pad_step(), step({9}, {10})};
  padded.prefix_len = 1;
  CHECK(critic.featurize(padded) == std::vector<double>{0, 0, 0, 0, 0, 0, 9, 10, 1});

  SegmentFeatures toolong;
  toolong.steps = {step({1}, {1}), step({2}, {2}), step({3}, {3}), step({4}, {4})};
  CHECK_THROWS_AS(critic.featurize(toolong), std::length_error);
}

// ---------------------------------------------------------------------------
// Training losses

namespace {

// A critic whose parts are affine with hand-set weights: H == 0 and
// C(s, a, k) = s + 2a, over one-dimensional states and actions.
HcCritic make_affine_critic(double lambda, Rng& rng) {
  HcConfig config;
  config.kind = HKind::Singleton;
  config.state_dim = 1;
  config.action_dim = 1;
  config.depth = 0;
  config.max_interval_len = 2;
  config.overlap = 0;
  config.lambda = lambda;
  HcCritic critic(config, rng);
  critic.h().set_parameters({0.0, 0.0, 0.0});
  critic.c().parameters() = {1.0, 2.0, 0.0, 0.0};
  critic.soft_update_targets(1.0);
  return critic;
}

Actor make_zero_actor(Rng& rng) {
  Actor actor(1, 1, 1, 0, rng);
  for (double& p : actor.net().parameters()) p = 0.0;
  return actor;
}

}  // namespace

TEST_CASE("the decomposed temporal-difference loss matches hand arithmetic") {
  Rng rng(41);
  const HcCritic critic = make_affine_critic(0.0, rng);
  const Actor actor = make_zero_actor(rng);

  SegmentFeatures seg;
  seg.steps = {step({0.5}, {0.25})};
  seg.prefix_len = 0;

  SUBCASE("mid-interval step bootstraps from the extended key") {
    const ReplayRecord record = make_record(seg, 0.0, false, {1.0}, false);
    const LossResult out = hc_td_loss(critic, {record}, actor, 0.5);
    // pred = 0.5 + 2*0.25 = 1; target = 0.5 * C(1, 0, phase 1) = 0.5.
    CHECK(out.loss == 0.25);
    REQUIRE(out.grad.size() == 7);
    CHECK(out.grad[0] == 0.0);  // H saw an empty history
    CHECK(out.grad[1] == 0.0);
    CHECK(out.grad[2] == 0.0);
    CHECK(out.grad[3] == 0.5);   // d/dw_s = 2 * delta * s
    CHECK(out.grad[4] == 0.25);  // d/dw_a
    CHECK(out.grad[5] == 0.0);   // d/dw_phase, phase input 0
    CHECK(out.grad[6] == 1.0);   // d/db = 2 * delta
  }

  SUBCASE("an interval end restarts the context before bootstrapping") {
    const ReplayRecord record = make_record(seg, 2.0, true, {1.0}, false);
    const LossResult out = hc_td_loss(critic, {record}, actor, 0.5);
    // pred = 1; target = 2 + 0.5 * C(1, 0, phase 0) = 2.5; delta = -1.5.
    CHECK(out.loss == 2.25);
    CHECK(out.grad[3] == -1.5);
    CHECK(out.grad[4] == -0.75);
    CHECK(out.grad[5] == 0.0);
    CHECK(out.grad[6] == -3.0);
  }

  SUBCASE("a terminal successor contributes target value zero") {
    const ReplayRecord record = make_record(seg, 2.0, true, {1.0}, true);
    const LossResult out = hc_td_loss(critic, {record}, actor, 0.5);
    // pred = 1; target = 2; delta = -1.
    CHECK(out.loss == 1.0);
    CHECK(out.grad[6] == -2.0);
  }
}

TEST_CASE("the interval-regression term feeds the history structure") {
  Rng rng(42);

  SUBCASE("standalone loss over completed intervals") {
    HcCritic critic = make_affine_critic(0.0, rng);
    std::vector<RegSample> completed;
    SegmentFeatures a;
    a.steps = {step({0.0}, {0.0})};
    completed.push_back({a, 1.0});
    SegmentFeatures b;
    b.steps = {step({1.0}, {1.0})};
    completed.push_back({b, 2.0});
    const LossResult out = reg_loss(critic.h(), completed);
    // H == 0, so the loss is ((0-1)^2 + (0-2)^2) / 2.
    CHECK(out.loss == 2.5);
    REQUIRE(out.grad.size() == 3);
    CHECK(out.grad[0] == -2.0);  // only sample b has nonzero inputs
    CHECK(out.grad[1] == -2.0);
    CHECK(out.grad[2] == -3.0);  // both samples push the bias down
    CHECK_THROWS_AS(reg_loss(critic.h(), {}), std::invalid_argument);
  }

  SUBCASE("the weighted term joins the temporal-difference loss") {
    const HcCritic critic = make_affine_critic(2.0, rng);
    const Actor actor = make_zero_actor(rng);
    SegmentFeatures seg;
    seg.steps = {step({0.5}, {0.25})};
    const ReplayRecord record = make_record(seg, 2.0, true, {1.0}, false);
    const LossResult out = hc_td_loss(critic, {record}, actor, 0.5);
    // td part 2.25 as above; regression part (0 - 2)^2 = 4, weighted by 2.
    CHECK(out.loss == 10.25);
    // Regression seed 2 * (0 - 2), weighted by lambda = 2, times dH/dp.
    CHECK(out.grad[0] == 2.0 * -4.0 * 0.5);  // H weight on the state input
    CHECK(out.grad[1] == 2.0 * -4.0 * 0.25);
    CHECK(out.grad[2] == 2.0 * -4.0);  // H bias
    CHECK(out.grad[3] == -1.5);        // the current-step part is unchanged
  }
}

TEST_CASE("batch operations validate their records") {
  Rng rng(43);
  const HcCritic critic = make_affine_critic(0.0, rng);
  const Actor actor = make_zero_actor(rng);
  CHECK_THROWS_AS(hc_td_loss(critic, {}, actor, 0.5), std::invalid_argument);

  SegmentFeatures seg;
  seg.steps = {step({0.5}, {0.25})};
  ReplayRecord bad_phase = make_record(seg, 0.0, false, {1.0}, false);
  bad_phase.phase = 1;
  CHECK_THROWS_AS(hc_td_loss(critic, {bad_phase}, actor, 0.5), std::invalid_argument);

  SegmentFeatures padded;
  padded.steps = {pad_step()};
  ReplayRecord bad_last;
  bad_last.segment = padded;
  bad_last.phase = 0;
  CHECK_THROWS_AS(hc_td_loss(critic, {bad_last}, actor, 0.5), std::invalid_argument);

  SegmentFeatures deep;
  deep.steps = {step({0.1}, {0.1}), step({0.2}, {0.2}), step({0.3}, {0.3})};
  const ReplayRecord too_deep = make_record(deep, 0.0, false, {1.0}, false);
  CHECK_THROWS_AS(hc_td_loss(critic, {too_deep}, actor, 0.5), std::invalid_argument);
}

TEST_CASE("the decomposed loss gradient matches central differences") {
  Rng rng(44);
  HcConfig config;
  config.kind = HKind::Singleton;
  config.state_dim = 2;
  config.action_dim = 1;
  config.width = 4;
  config.depth = 1;
  config.max_interval_len = 2;
  config.overlap = 1;
  config.lambda = 0.7;
  HcCritic critic(config, rng);
  Actor actor(2, 1, 4, 1, rng);

  std::vector<ReplayRecord> batch;
  {
    SegmentFeatures seg;
    seg.steps = {pad_step(), step({0.2, -0.4}, {0.3})};
    seg.prefix_len = 1;
    batch.push_back(make_record(seg, 0.0, false, {0.6, 0.1}, false));
  }
  {
    SegmentFeatures seg;
    seg.steps = {step({0.5, 0.5}, {-0.2}), step({0.1, 0.9}, {0.4}), step({-0.3, 0.2}, {0.8})};
    seg.prefix_len = 1;
    batch.push_back(make_record(seg, 1.3, true, {0.7, -0.6}, false));
  }
  {
    SegmentFeatures seg;
    seg.steps = {pad_step(), step({-0.1, 0.3}, {0.5}), step({0.8, -0.8}, {-0.9})};
    seg.prefix_len = 1;
    batch.push_back(make_record(seg, -0.4, true, {0.0, 0.0}, true));
  }

  const LossResult out = hc_td_loss(critic, batch, actor, 0.9);
  const std::vector<double> saved = critic.parameters();
  HcCritic& mutable_critic = critic;
  const double fd_step = 1e-6;
  for (int probe = 0; probe < 10; ++probe) {
    const auto idx = static_cast<std::size_t>(rng.below(critic.parameter_count()));
    std::vector<double> params = saved;
    params[idx] = saved[idx] + fd_step;
    mutable_critic.set_parameters(params);
    const double up = hc_td_loss(critic, batch, actor, 0.9).loss;
    params[idx] = saved[idx] - fd_step;
    mutable_critic.set_parameters(params);
    const double down = hc_td_loss(critic, batch, actor, 0.9).loss;
    mutable_critic.set_parameters(saved);
    const double numeric = (up - down) / (2.0 * fd_step);
    const double scale = std::max({1.0, std::abs(out.grad[idx]), std::abs(numeric)});
    CHECK(std::abs(out.grad[idx] - numeric) / scale < 1e-5);
  }
}

TEST_CASE("the comparison critic loss matches hand arithmetic and differences") {
  Rng rng(45);

  SUBCASE("hand case with a constant critic") {
    MonolithicCritic critic(0, 2, 1, 1, 1, 0, rng);
    critic.net().parameters() = {0, 0, 0, 0, 0, 0, 1.0};  // value == 1 everywhere
    critic.soft_update_targets(1.0);
    const Actor actor = make_zero_actor(rng);
    SegmentFeatures seg;
    seg.steps = {step({2}, {3})};
    const ReplayRecord record = make_record(seg, 0.0, false, {4.0}, false);
    const LossResult out = monolithic_td_loss(critic, {record}, actor, 0.5);
    // pred = 1, target = 0.5 * 1; delta = 0.5.
    CHECK(out.loss == 0.25);
    CHECK(out.grad == std::vector<double>{0, 0, 0, 2, 3, 1, 1});
  }

  SUBCASE("gradient matches central differences") {
    MonolithicCritic critic(1, 2, 2, 1, 5, 1, rng);
    Actor actor(2, 1, 4, 1, rng);
    std::vector<ReplayRecord> batch;
    {
      SegmentFeatures seg;
      seg.steps = {pad_step(), step({0.2, -0.4}, {0.3})};
      seg.prefix_len = 1;
      batch.push_back(make_record(seg, 0.0, false, {0.6, 0.1}, false));
    }
    {
      SegmentFeatures seg;
      seg.steps = {step({0.5, 0.5}, {-0.2}), step({0.1, 0.9}, {0.4}),
                   step({-0.3, 0.2}, {0.8})};
      seg.prefix_len = 1;
      batch.push_back(make_record(seg, 1.3, true, {0.7, -0.6}, false));
    }
    const LossResult out = monolithic_td_loss(critic, batch, actor, 0.9);
    std::vector<double>& params = critic.net().parameters();
    const double fd_step = 1e-6;
    for (int probe = 0; probe < 8; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(critic.net().parameter_count()));
      const double save = params[idx];
      params[idx] = save + fd_step;
      const double up = monolithic_td_loss(critic, batch, actor, 0.9).loss;
      params[idx] = save - fd_step;
      const double down = monolithic_td_loss(critic, batch, actor, 0.9).loss;
      params[idx] = save;
      const double numeric = (up - down) / (2.0 * fd_step);
      const double scale = std::max({1.0, std::abs(out.grad[idx]), std::abs(numeric)});
      CHECK(std::abs(out.grad[idx] - numeric) / scale < 1e-5);
    }
  }
}

// ---------------------------------------------------------------------------
// Policy gradients

TEST_CASE("the policy gradient chains through the current-step part alone") {
  Rng rng(51);

  SUBCASE("a critic ignoring the action yields a zero gradient") {
    HcCritic critic = make_affine_critic(0.0, rng);
    critic.c().parameters() = {1.0, 0.0, 0.0, 0.0};  // C = s, no action term
    Actor actor(1, 1, 4, 1, rng);
    SegmentFeatures seg;
    seg.steps = {step({0.5}, {0.9})};
    const std::vector<double> grad =
        hc_policy_gradient(critic, {make_record(seg, 0.0, false, {1.0}, false)}, actor);
    for (const double g : grad) CHECK(g == 0.0);
  }

  SUBCASE("hand case through an affine tanh actor") {
    HcCritic critic = make_affine_critic(0.0, rng);
    critic.c().parameters() = {0.0, 1.0, 0.0, 0.0};  // C = a
    Rng arng(52);
    Actor actor(1, 1, 1, 0, arng);
    actor.net().parameters() = {0.25, 0.0, 0.125};  // z = 0.25 s + 0.125
    SegmentFeatures seg;
    seg.steps = {step({0.5}, {0.9})};
    const std::vector<double> grad =
        hc_policy_gradient(critic, {make_record(seg, 0.0, false, {1.0}, false)}, actor);
    const double a = std::tanh(0.25);  // z = 0.125 + 0.25 * 0.5
    const double d = 1.0 - a * a;
    REQUIRE(grad.size() == 3);
    CHECK(grad[0] == d * 0.5);
    CHECK(grad[1] == 0.0);
    CHECK(grad[2] == d);
  }

  SUBCASE("both arms match central differences through the actor") {
    HcConfig config;
    config.state_dim = 2;
    config.action_dim = 2;
    config.width = 5;
    config.depth = 1;
    config.max_interval_len = 2;
    config.overlap = 1;
    HcCritic critic(config, rng);
    MonolithicCritic mono(1, 2, 2, 2, 5, 1, rng);
    Actor actor(2, 2, 4, 1, rng);
    std::vector<ReplayRecord> batch;
    {
      SegmentFeatures seg;
      seg.steps = {pad_step(), step({0.2, -0.4}, {0.3, 0.1})};
      seg.prefix_len = 1;
      batch.push_back(make_record(seg, 0.0, false, {0.6, 0.1}, false));
    }
    {
      SegmentFeatures seg;
      seg.steps = {step({0.5, 0.5}, {-0.2, 0.9}), step({0.1, 0.9}, {0.4, -0.5})};
      seg.prefix_len = 1;
      batch.push_back(make_record(seg, 1.3, true, {0.7, -0.6}, false));
    }

    auto hc_objective = [&]() {
      double total = 0.0;
      for (const ReplayRecord& r : batch) {
        const std::vector<double>& s = r.segment.last().state;
        const std::vector<double> a = actor.act(s, critic.phase_norm(r.phase));
        total += critic.c().forward_scalar(critic.c_input(s, a, r.phase));
      }
      return total / static_cast<double>(batch.size());
    };
    auto mono_objective = [&]() {
      double total = 0.0;
      for (const ReplayRecord& r : batch) {
        SegmentFeatures swapped = r.segment;
        swapped.steps.back().action =
            actor.act(swapped.last().state, mono.phase_norm(r.phase));
        total += mono.value(swapped);
      }
      return total / static_cast<double>(batch.size());
    };

    const std::vector<double> hc_grad = hc_policy_gradient(critic, batch, actor);
    const std::vector<double> mono_grad = monolithic_trajectory_gradient(mono, batch, actor);
    std::vector<double>& params = actor.net().parameters();
    const double fd_step = 1e-6;
    for (int probe = 0; probe < 8; ++probe) {
      const auto idx = static_cast<std::size_t>(rng.below(actor.net().parameter_count()));
      const double save = params[idx];
      for (const bool mono_arm : {false, true}) {
        params[idx] = save + fd_step;
        const double up = mono_arm ? mono_objective() : hc_objective();
        params[idx] = save - fd_step;
        const double down = mono_arm ? mono_objective() : hc_objective();
        params[idx] = save;
        const double numeric = (up - down) / (2.0 * fd_step);
        const double analytic = mono_arm ? mono_grad[idx] : hc_grad[idx];
        const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
        CHECK(std::abs(analytic - numeric) / scale < 1e-5);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Gradient-variance estimation

TEST_CASE("summed sample variance uses the unbiased divisor") {
  const std::vector<double> g = {1.0, 2.0, 3.0};
  std::vector<double> neg = g;
  for (double& x : neg) x = -x;
  // Mean zero, so each coordinate contributes 2 g_j^2 / (2 - 1).
  CHECK(summed_sample_variance({g, neg}) == 28.0);
  CHECK(summed_sample_variance({g, g}) == 0.0);
  CHECK_THROWS_AS(summed_sample_variance({g}), std::invalid_argument);
  CHECK_THROWS_AS(summed_sample_variance({g, {1.0}}), std::invalid_argument);
}

TEST_CASE("gradient variance probes are deterministic and validated") {
  Rng rng(61);
  HcConfig config;
  config.state_dim = 2;
  config.action_dim = 1;
  config.width = 4;
  config.depth = 1;
  config.max_interval_len = 2;
  config.overlap = 0;
  HcCritic hc(config, rng);
  MonolithicCritic mono(0, 2, 2, 1, 4, 1, rng);
  Actor actor(2, 1, 4, 1, rng);

  GradientVarianceProbe probe;
  probe.hc = &hc;
  probe.monolithic = &mono;
  probe.actor = &actor;
  {
    SegmentFeatures seg;
    seg.steps = {step({0.2, -0.4}, {0.3})};
    probe.batch.push_back(make_record(seg, 0.0, false, {0.6, 0.1}, false));
  }
  {
    SegmentFeatures seg;
    seg.steps = {step({0.8, 0.1}, {-0.6}), step({-0.2, 0.5}, {0.9})};
    probe.batch.push_back(make_record(seg, 1.0, true, {0.3, 0.3}, false));
  }
  {
    SegmentFeatures seg;
    seg.steps = {step({-0.7, -0.7}, {0.2})};
    probe.batch.push_back(make_record(seg, 0.0, false, {0.1, -0.9}, false));
  }

  const VarianceReport first = estimate_gradient_variance(probe);
  const VarianceReport second = estimate_gradient_variance(probe);
  CHECK(first.hc_variance >= 0.0);
  CHECK(first.monolithic_variance >= 0.0);
  CHECK(first.hc_variance == second.hc_variance);
  CHECK(first.monolithic_variance == second.monolithic_variance);
  CHECK(first.hc_variance > 0.0);  // distinct records disagree somewhere

  // Two copies of one record have exactly zero spread.
  GradientVarianceProbe twin = probe;
  twin.batch = {probe.batch[0], probe.batch[0]};
  const VarianceReport none = estimate_gradient_variance(twin);
  CHECK(none.hc_variance == 0.0);
  CHECK(none.monolithic_variance == 0.0);

  GradientVarianceProbe tiny = probe;
  tiny.batch = {probe.batch[0]};
  CHECK_THROWS_AS(estimate_gradient_variance(tiny), std::invalid_argument);
  GradientVarianceProbe hollow;
  CHECK_THROWS_AS(estimate_gradient_variance(hollow), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Parameter snapshots

TEST_CASE("snapshots round-trip every bit of every section") {
  Rng rng(71);
  MlpSpec spec;
  spec.input_dim = 3;
  spec.hidden = {4};
  spec.output_dim = 2;
  spec.tanh_output = true;
  const Mlp net(spec, rng);

  std::vector<SnapshotSection> sections;
  sections.push_back({"actor", net.spec().describe(), net.parameters()});
  sections.push_back({"oddballs", "raw",
                      {0.0, -0.0, 1.0, -1.5, 3.141592653589793, 1e-300, -1e300}});

  const std::string path = "snapshot_roundtrip.tmp";
  save_snapshot(path, sections);
  const std::vector<SnapshotSection> loaded = load_snapshot(path);
  REQUIRE(loaded.size() == 2);
  for (std::size_t s = 0; s < sections.size(); ++s) {
    CHECK(loaded[s].name == sections[s].name);
    CHECK(loaded[s].arch == sections[s].arch);
    REQUIRE(loaded[s].values.size() == sections[s].values.size());
    for (std::size_t i = 0; i < sections[s].values.size(); ++i) {
      CHECK(same_bits(loaded[s].values[i], sections[s].values[i]));
    }
  }
  CHECK(std::signbit(loaded[1].values[1]));
  std::remove(path.c_str());
}

TEST_CASE("snapshots detect corruption, truncation, and bad headers") {
  const std::string path = "snapshot_corrupt.tmp";
  save_snapshot(path, {{"weights", "mlp in=1 hidden=- out=1 act=linear", {1.0, 2.0, 3.0}}});

  SUBCASE("flipping a payload byte breaks the checksum") {
    std::fstream file(path, std::ios::in | std::ios::out | std::ios::binary);
    file.seekg(0, std::ios::end);
    const std::streamoff size = file.tellg();
    file.seekp(size - 5);
    file.put('\x7f');
    file.close();
    CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("checksum"),
                         std::runtime_error);
  }

  SUBCASE("truncating the payload is reported as such") {
    std::ifstream in(path, std::ios::binary);
    std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(all.data(), static_cast<std::streamsize>(all.size() - 8));
    out.close();
    CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("truncated"),
                         std::runtime_error);
  }

  SUBCASE("a file with the wrong magic line is rejected") {
    std::ofstream out(path, std::ios::trunc);
    out << "something else\n";
    out.close();
    CHECK_THROWS_WITH_AS(load_snapshot(path), doctest::Contains("magic"), std::runtime_error);
  }

  std::remove(path.c_str());
  CHECK_THROWS_AS(load_snapshot("definitely-not-a-file.tmp"), std::runtime_error);
}
