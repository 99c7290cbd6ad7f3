#include "drlab/core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "drlab/core/feasibility.hpp"
#include "drlab/core/serialize.hpp"

namespace drlab {

namespace {

// Reward order comparisons treat |delta| <= 1e-12 as a tie.
constexpr double kOrderTie = 1e-12;
// Strong form: reward differences must agree across pasts within 1e-9.
constexpr double kStrongTolerance = 1e-9;

std::string format_steps(const DrmdpSpec& spec, const std::vector<Step>& steps) {
  std::ostringstream out;
  for (const auto& st : steps) {
    if (st.is_padding()) {
      out << "(~)";
    } else {
      out << '(' << spec.state_names[st.state] << ' '
          << spec.action_names[st.state][st.action] << ')';
    }
  }
  return out.str();
}

}  // namespace

double discounted_return(const EpisodeTrace& trace, double gamma) {
  double total = 0.0;
  std::int64_t t = 0;
  for (const auto& iv : trace.intervals) {
    t += iv.length;
    if (iv.length > 0) {
      total += std::pow(gamma, static_cast<double>(t - 1)) * iv.reward;
    }
  }
  return total;
}

namespace {

double reward_of_steps(const DrmdpSpec& spec, const std::vector<Step>& steps,
                       std::int32_t prefix_len) {
  const auto current_len = static_cast<std::int32_t>(steps.size()) - prefix_len;
  switch (spec.reward.kind) {
    case RewardKind::Sum: {
      // Overlapped sum: the window slides c steps back, covering the
      // segment's first current-length slots (padding contributes 0).
      double total = 0.0;
      for (std::int32_t j = 0; j < current_len; ++j) {
        total += spec.step_reward_of(steps[j]);
      }
      return total;
    }
    case RewardKind::Max: {
      double best = -std::numeric_limits<double>::infinity();
      for (std::int32_t j = prefix_len; j < static_cast<std::int32_t>(steps.size()); ++j) {
        best = std::max(best, spec.step_reward_of(steps[j]));
      }
      return 10.0 * best;
    }
    case RewardKind::Square: {
      double avg = 0.0;
      for (std::int32_t j = prefix_len; j < static_cast<std::int32_t>(steps.size()); ++j) {
        avg += spec.step_reward_of(steps[j]);
      }
      avg /= static_cast<double>(current_len);
      const double f = std::abs(avg) < 1.0 ? avg : std::copysign(avg * avg, avg);
      return 4.0 * f;
    }
    case RewardKind::WeightedSum: {
      double total = 0.0;
      for (std::size_t j = 0; j < steps.size(); ++j) {
        total += spec.reward.weights[j] * spec.step_reward_of(steps[j]);
      }
      return total;
    }
    case RewardKind::Tabulated: {
      auto it = spec.reward.table.find(steps);
      if (it == spec.reward.table.end()) {
        throw std::out_of_range("tabulated reward has no entry for segment " +
                                format_steps(spec, steps));
      }
      return it->second;
    }
  }
  throw std::invalid_argument("unknown reward kind");
}

}  // namespace

double evaluate_reward(const DrmdpSpec& spec, const TrajectorySegment& segment) {
  if (segment.prefix_len != spec.overlap_c) {
    throw std::invalid_argument("segment prefix does not match the spec's overlap");
  }
  if (spec.interval_law.pmf(segment.current_len()) <= 0.0) {
    throw std::invalid_argument("segment length " + std::to_string(segment.current_len()) +
                                " is not a supported interval length");
  }
  return reward_of_steps(spec, segment.steps, segment.prefix_len);
}

std::optional<double> evaluate_reward_truncated(const DrmdpSpec& spec,
                                                const TrajectorySegment& segment) {
  if (segment.current_len() <= 0) return 0.0;
  if (spec.reward.kind == RewardKind::Tabulated &&
      spec.reward.table.find(segment.steps) == spec.reward.table.end()) {
    return std::nullopt;
  }
  return reward_of_steps(spec, segment.steps, segment.prefix_len);
}

bool interval_start_terminates(const DrmdpSpec& spec, StateId state,
                               const std::vector<Step>& prefix) {
  if (!spec.zero_reward_absorbing(state)) return false;
  if (spec.overlap_c == 0) return true;
  switch (spec.reward.kind) {
    case RewardKind::Sum:
    case RewardKind::WeightedSum:
      // The window over a sink interval still reads the prefix slots.
      for (const auto& st : prefix) {
        if (spec.step_reward_of(st) != 0.0) return false;
      }
      return true;
    case RewardKind::Tabulated:
      // Safe once the prefix itself is all padding/self-loop; the sink's
      // loop-only entries were verified reward-free.
      for (const auto& st : prefix) {
        if (!st.is_padding() && !(st.state == state && st.action == 0)) return false;
      }
      return true;
    case RewardKind::Max:
    case RewardKind::Square:
      return true;  // these kinds are restricted to zero overlap
  }
  return false;
}

std::string PiWitness::describe(const DrmdpSpec& spec) const {
  std::ostringstream out;
  out << "past1=" << format_steps(spec, past1.steps)
      << " past2=" << format_steps(spec, past2.steps)
      << " cont1=" << format_steps(spec, cont1)
      << " cont2=" << format_steps(spec, cont2) << " r11=" << format_double(r11)
      << " r12=" << format_double(r12) << " r21=" << format_double(r21)
      << " r22=" << format_double(r22);
  return out.str();
}

namespace {

PiReport check_pi_impl(const DrmdpSpec& spec, std::int32_t max_len, std::int64_t cap,
                       bool strong) {
  Feasibility feas(spec);
  auto complete = feas.segments(/*complete_only=*/true, cap);

  // Split every complete segment at every past/continuation cut and index
  // continuations (with the full segment's reward) per past.
  using Cont = std::vector<Step>;
  std::map<TrajectorySegment, std::vector<std::pair<Cont, double>>> by_past;
  for (const auto& seg : complete) {
    if (seg.total_len() > max_len) continue;
    const double r = reward_of_steps(spec, seg.steps, seg.prefix_len);
    for (std::int32_t cut = spec.overlap_c; cut < seg.total_len(); ++cut) {
      TrajectorySegment past{{seg.steps.begin(), seg.steps.begin() + cut},
                             spec.overlap_c};
      Cont cont{seg.steps.begin() + cut, seg.steps.end()};
      by_past[std::move(past)].emplace_back(std::move(cont), r);
    }
  }
  for (auto& [past, conts] : by_past) std::sort(conts.begin(), conts.end());

  // Group equal-length pasts and compare every jointly feasible pair of
  // equal-length continuations.
  std::map<std::int32_t, std::vector<const decltype(by_past)::value_type*>> by_len;
  for (const auto& entry : by_past) by_len[entry.first.total_len()].push_back(&entry);

  PiReport report;
  for (const auto& [len, group] : by_len) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const auto& [past1, conts1] = *group[i];
        const auto& [past2, conts2] = *group[j];
        // Continuations feasible after both pasts, with both rewards.
        std::vector<std::pair<const Cont*, std::pair<double, double>>> shared;
        std::size_t a = 0, b = 0;
        while (a < conts1.size() && b < conts2.size()) {
          if (conts1[a].first < conts2[b].first) { ++a; continue; }
          if (conts2[b].first < conts1[a].first) { ++b; continue; }
          shared.push_back({&conts1[a].first, {conts1[a].second, conts2[b].second}});
          ++a; ++b;
        }
        for (std::size_t u = 0; u < shared.size(); ++u) {
          for (std::size_t v = u + 1; v < shared.size(); ++v) {
            if (shared[u].first->size() != shared[v].first->size()) continue;
            ++report.comparisons;
            const double r11 = shared[u].second.first;
            const double r12 = shared[v].second.first;
            const double r21 = shared[u].second.second;
            const double r22 = shared[v].second.second;
            const double d1 = r11 - r12;
            const double d2 = r21 - r22;
            bool violated;
            if (strong) {
              violated = std::abs(d1 - d2) > kStrongTolerance;
            } else {
              const bool tie1 = std::abs(d1) <= kOrderTie;
              const bool tie2 = std::abs(d2) <= kOrderTie;
              violated = (tie1 != tie2) || (!tie1 && !tie2 && (d1 > 0) != (d2 > 0));
            }
            if (violated) {
              report.holds = false;
              report.witness = PiWitness{past1, past2, *shared[u].first,
                                         *shared[v].first, r11, r12, r21, r22};
              return report;
            }
          }
        }
      }
    }
  }
  return report;
}

}  // namespace

PiReport check_pi_condition(const DrmdpSpec& spec, std::int32_t max_len,
                            std::int64_t cap) {
  return check_pi_impl(spec, max_len, cap, /*strong=*/false);
}

PiReport check_strong_pi_condition(const DrmdpSpec& spec, std::int32_t max_len,
                                   std::int64_t cap) {
  return check_pi_impl(spec, max_len, cap, /*strong=*/true);
}

}  // namespace drlab
