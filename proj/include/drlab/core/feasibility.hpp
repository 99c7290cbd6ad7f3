#pragma once

#include <cstdint>
#include <vector>

#include "drlab/core/spec.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// Reachability analysis for small finite specs: which states can begin a
// signal interval, with which c-step prefixes, and which trajectory
// segments are feasible at all.
//
// A segment is feasible when some episode realizes it with positive
// probability under some (possibly history-dependent) policy. Because
// interval lengths are drawn i.i.d. and actions are unconstrained, that
// reduces to two checks: consecutive steps must have positive transition
// probability, and the interval start time t_i must simultaneously be a
// sum of supported interval lengths and leave the segment's first
// realized state reachable from the initial distribution in exactly
// t_i - (realized prefix length) steps. Both the boundary-time set and
// the reachable-at-time sets are computed up to an internal horizon
// generous enough for the spec sizes the enumerators accept (the sets
// are eventually periodic in t).
class Feasibility {
 public:
  explicit Feasibility(const DrmdpSpec& spec);

  // A feasible interval-start context: the c prefix slots (padding and/or
  // realized steps; current_len() == 0) plus the state the interval
  // starts in.
  struct StartContext {
    TrajectorySegment prefix;
    StateId state = 0;

    friend bool operator==(const StartContext&, const StartContext&) = default;
    friend auto operator<=>(const StartContext&, const StartContext&) = default;
  };
  const std::vector<StartContext>& starts() const { return starts_; }

  // Whether some signal interval can begin in state s.
  bool can_start_interval(StateId s) const { return can_start_[s] != 0; }

  // All feasible segments ending in an action (prefix + k current steps).
  // `complete_only` restricts k to the interval law's support; otherwise
  // k ranges over [1, max interval length]. Every visited partial segment
  // counts against `cap`; throws std::length_error when exceeded.
  std::vector<TrajectorySegment> segments(bool complete_only, std::int64_t cap) const;

 private:
  const DrmdpSpec* spec_;
  std::vector<StartContext> starts_;
  std::vector<char> can_start_;
};

}  // namespace drlab
