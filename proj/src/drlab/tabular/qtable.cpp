#include "drlab/tabular/qtable.hpp"

#include <deque>
#include <sstream>
#include <stdexcept>

#include "drlab/core/analysis.hpp"
#include "drlab/core/feasibility.hpp"

namespace drlab {

TrajectorySegment restart_context(const DrmdpSpec& spec, const TrajectorySegment& completed) {
  const std::int32_t c = spec.overlap_c;
  if (completed.total_len() < c) {
    throw std::invalid_argument("restart_context: segment shorter than the overlap depth");
  }
  TrajectorySegment out;
  out.prefix_len = c;
  out.steps.assign(completed.steps.end() - c, completed.steps.end());
  return out;
}

TrajectorySegment extend_segment(const TrajectorySegment& segment, Step step) {
  TrajectorySegment out = segment;
  out.steps.push_back(step);
  return out;
}

TrajectoryQTable TrajectoryQTable::zero(const DrmdpSpec& spec, std::int64_t cap,
                                        std::int32_t horizon_cap) {
  TrajectoryQTable table;
  table.spec_ = &spec;
  table.horizon_cap_ = horizon_cap;

  Feasibility feas(spec);
  std::deque<TrajectorySegment> work;
  for (TrajectorySegment& key : feas.segments(/*complete_only=*/false, cap)) {
    work.push_back(std::move(key));
  }
  for (const TrajectorySegment& key : work) table.entries_.emplace(key, 0.0);

  // Close the key set under both Bellman successors. The feasibility
  // enumeration already covers everything reachable, so this normally
  // adds nothing; it guarantees sweeps can never miss a key regardless.
  const std::int32_t max_n = spec.interval_law.max_n();
  while (!work.empty()) {
    TrajectorySegment key = std::move(work.front());
    work.pop_front();
    const Step last = key.last();
    const auto& row = spec.transition[last.state][last.action];
    const std::int32_t k = key.current_len();

    auto visit = [&](const TrajectorySegment& base) {
      for (const auto& [next_state, prob] : row) {
        (void)prob;
        for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
          TrajectorySegment succ = extend_segment(base, Step{next_state, a});
          if (table.entries_.emplace(succ, 0.0).second) {
            if (static_cast<std::int64_t>(table.entries_.size()) > cap) {
              throw std::length_error("trajectory key closure exceeded cap");
            }
            work.push_back(std::move(succ));
          }
        }
      }
    };

    if (k < max_n) visit(key);
    if (spec.interval_law.hazard(k) > 0.0) {
      const TrajectorySegment restart = restart_context(spec, key);
      for (const auto& [next_state, prob] : row) {
        (void)prob;
        if (interval_start_terminates(spec, next_state, restart.steps)) continue;
        for (ActionId a = 0; a < spec.num_actions(next_state); ++a) {
          TrajectorySegment succ = extend_segment(restart, Step{next_state, a});
          if (table.entries_.emplace(succ, 0.0).second) {
            if (static_cast<std::int64_t>(table.entries_.size()) > cap) {
              throw std::length_error("trajectory key closure exceeded cap");
            }
            work.push_back(std::move(succ));
          }
        }
      }
    }
  }
  return table;
}

double TrajectoryQTable::value(const TrajectorySegment& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw std::out_of_range("trajectory table has no entry for key " + format_key(key));
  }
  return it->second;
}

void TrajectoryQTable::set_value(const TrajectorySegment& key, double v) {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw std::out_of_range("trajectory table has no entry for key " + format_key(key));
  }
  it->second = v;
}

double TrajectoryQTable::sup_distance(const TrajectoryQTable& other) const {
  if (entries_.size() != other.entries_.size()) {
    throw std::invalid_argument("sup_distance requires identical key sets");
  }
  double sup = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  for (; a != entries_.end(); ++a, ++b) {
    if (a->first != b->first) {
      throw std::invalid_argument("sup_distance requires identical key sets");
    }
    sup = std::max(sup, std::abs(a->second - b->second));
  }
  return sup;
}

std::string TrajectoryQTable::format_key(const TrajectorySegment& key) const {
  std::ostringstream out;
  for (std::int32_t i = 0; i < key.total_len(); ++i) {
    if (i == key.prefix_len) out << '/';
    const Step& st = key.steps[i];
    if (st.is_padding()) {
      out << "~";
    } else {
      out << '(' << spec_->state_names[st.state] << ' '
          << spec_->action_names[st.state][st.action] << ')';
    }
  }
  if (key.prefix_len == key.total_len()) out << '/';
  return out.str();
}

std::string TrajectoryQTable::to_csv() const {
  std::ostringstream out;
  out << "segment,value\n";
  out.precision(17);
  for (const auto& [key, v] : entries_) {
    out << format_key(key) << ',' << v << '\n';
  }
  return out.str();
}

}  // namespace drlab
