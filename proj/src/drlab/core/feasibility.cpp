#include "drlab/core/feasibility.hpp"

#include <algorithm>
#include <stdexcept>

namespace drlab {

namespace {

// Depth-first extension of an interval start into all feasible segments.
struct SegmentDfs {
  const DrmdpSpec& spec;
  bool complete_only;
  std::int64_t cap;
  std::int64_t visited = 0;
  std::vector<TrajectorySegment>* out;
  TrajectorySegment work;

  void extend(StateId s, std::int32_t len) {
    for (ActionId a = 0; a < spec.num_actions(s); ++a) {
      if (++visited > cap) {
        throw std::length_error("segment enumeration exceeded its cap");
      }
      work.steps.push_back({s, a});
      const std::int32_t k = len + 1;
      if (complete_only ? spec.interval_law.pmf(k) > 0.0 : true) {
        out->push_back(work);
      }
      if (k < spec.interval_law.max_n()) {
        for (const auto& [next, p] : spec.transition[s][a]) {
          if (p > 0.0) extend(next, k);
        }
      }
      work.steps.pop_back();
    }
  }
};

}  // namespace

Feasibility::Feasibility(const DrmdpSpec& spec) : spec_(&spec) {
  const std::int32_t n_states = spec.num_states();
  const std::int32_t c = spec.overlap_c;
  const std::int32_t max_n = spec.interval_law.max_n();
  const std::int32_t t_lim = c + 8 * max_n + 64 + n_states;

  // reach[t][s]: s occupied with positive probability at step t under some
  // policy.
  std::vector<std::vector<char>> reach(t_lim + 1, std::vector<char>(n_states, 0));
  for (const auto& [s, p] : spec.initial_dist) {
    if (p > 0.0) reach[0][s] = 1;
  }
  for (std::int32_t t = 0; t < t_lim; ++t) {
    for (StateId s = 0; s < n_states; ++s) {
      if (!reach[t][s]) continue;
      for (ActionId a = 0; a < spec.num_actions(s); ++a) {
        for (const auto& [next, p] : spec.transition[s][a]) {
          if (p > 0.0) reach[t + 1][next] = 1;
        }
      }
    }
  }

  // boundary[t]: t is a sum of supported interval lengths (t_1 = 0 and
  // every later interval start).
  std::vector<char> boundary(t_lim + 1, 0);
  boundary[0] = 1;
  for (std::int32_t t = 0; t <= t_lim; ++t) {
    if (!boundary[t]) continue;
    for (std::int32_t n : spec.interval_law.support()) {
      if (t + n <= t_lim) boundary[t + n] = 1;
    }
  }

  can_start_.assign(n_states, 0);

  if (c == 0) {
    // Empty prefix; any state reachable at a boundary time can start.
    for (StateId s = 0; s < n_states; ++s) {
      for (std::int32_t t = 0; t <= t_lim; ++t) {
        if (boundary[t] && reach[t][s]) {
          starts_.push_back({TrajectorySegment{{}, 0}, s});
          can_start_[s] = 1;
          break;
        }
      }
    }
  } else {
    // chain_ok[s]: s can sit at the first slot of a full-length realized
    // prefix, i.e. s is reachable at time t_i - c for some boundary
    // t_i >= c.
    std::vector<char> chain_ok(n_states, 0);
    for (StateId s = 0; s < n_states; ++s) {
      for (std::int32_t t = c; t <= t_lim; ++t) {
        if (boundary[t] && reach[t - c][s]) { chain_ok[s] = 1; break; }
      }
    }

    auto initial_state = [&spec](StateId s) {
      for (const auto& [s0, p] : spec.initial_dist) {
        if (s0 == s && p > 0.0) return true;
      }
      return false;
    };

    // padded = number of leading padding slots; the realized remainder
    // starts the episode (padded > 0) or continues from mid-episode
    // (padded == 0).
    for (std::int32_t padded = c; padded >= 0; --padded) {
      const std::int32_t t_i = c - padded;  // meaningful when padded > 0
      if (padded > 0 && !(t_i <= t_lim && boundary[t_i])) continue;

      TrajectorySegment prefix;
      prefix.prefix_len = c;
      prefix.steps.assign(padded, Step{kPaddingState, kPaddingAction});

      // Recursively realize the c - padded remaining slots.
      auto realize = [&](auto&& self, std::int32_t slot, StateId s) -> void {
        if (slot == c) {
          starts_.push_back({prefix, s});
          can_start_[s] = 1;
          return;
        }
        for (ActionId a = 0; a < spec.num_actions(s); ++a) {
          prefix.steps.push_back({s, a});
          for (const auto& [next, p] : spec.transition[s][a]) {
            if (p > 0.0) self(self, slot + 1, next);
          }
          prefix.steps.pop_back();
        }
      };

      if (padded == c) {
        for (const auto& [s0, p] : spec.initial_dist) {
          if (p > 0.0) { starts_.push_back({prefix, s0}); can_start_[s0] = 1; }
        }
      } else {
        for (StateId s = 0; s < n_states; ++s) {
          const bool ok = padded > 0 ? initial_state(s) : chain_ok[s] != 0;
          if (ok) realize(realize, padded, s);
        }
      }
    }
    std::sort(starts_.begin(), starts_.end());
    starts_.erase(std::unique(starts_.begin(), starts_.end()), starts_.end());
  }
}

std::vector<TrajectorySegment> Feasibility::segments(bool complete_only,
                                                     std::int64_t cap) const {
  std::vector<TrajectorySegment> out;
  SegmentDfs dfs{*spec_, complete_only, cap, 0, &out, {}};
  for (const auto& start : starts_) {
    dfs.work = start.prefix;
    dfs.extend(start.state, 0);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace drlab
