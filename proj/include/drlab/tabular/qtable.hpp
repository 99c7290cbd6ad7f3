#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "drlab/core/spec.hpp"
#include "drlab/core/types.hpp"

namespace drlab {

// Exact value table indexed by trajectory segments tau_{t_i-c:t+1} (the
// overlap prefix plus every within-interval step up to and including the
// most recent action). Keys are exactly the feasible segments of the
// owning process, closed under both Bellman successors: extending within
// the interval and restarting with the completed interval's last c steps
// as the new prefix.
class TrajectoryQTable {
 public:
  // All-zero table over the full feasible key set. `cap` bounds the
  // enumeration (throws std::length_error when exceeded); `horizon_cap`
  // is carried for enumeration-based computations over this table.
  static TrajectoryQTable zero(const DrmdpSpec& spec, std::int64_t cap = 2'000'000,
                               std::int32_t horizon_cap = 10'000);

  const DrmdpSpec& spec() const { return *spec_; }
  std::int32_t horizon_cap() const { return horizon_cap_; }

  double value(const TrajectorySegment& key) const;
  void set_value(const TrajectorySegment& key, double v);
  bool contains(const TrajectorySegment& key) const { return entries_.count(key) > 0; }
  std::size_t size() const { return entries_.size(); }

  const std::map<TrajectorySegment, double>& entries() const { return entries_; }
  std::map<TrajectorySegment, double>& entries() { return entries_; }

  // Largest absolute value difference over the (identical) key sets.
  // Throws std::invalid_argument when the key sets differ.
  double sup_distance(const TrajectoryQTable& other) const;

  // One row per key: "segment,value" with the segment rendered as
  // "(s a)...(s a)/(s a)..." (prefix before '/', padding as "~").
  std::string to_csv() const;

  // Renders one key in the CSV's segment syntax.
  std::string format_key(const TrajectorySegment& key) const;

 private:
  const DrmdpSpec* spec_ = nullptr;
  std::int32_t horizon_cap_ = 0;
  std::map<TrajectorySegment, double> entries_;
};

// Value table of a plain state-action critic.
struct StateQTable {
  // (state, action) -> value; entries absent when the data distribution
  // never defines them.
  std::map<std::pair<StateId, ActionId>, double> entries;

  bool defined(StateId s, ActionId a) const { return entries.count({s, a}) > 0; }
  double value(StateId s, ActionId a) const { return entries.at({s, a}); }
};

// The segment a new interval starts with after `completed` ends: its last
// c slots become the prefix; no current steps yet.
TrajectorySegment restart_context(const DrmdpSpec& spec, const TrajectorySegment& completed);

// `segment` extended by one step.
TrajectorySegment extend_segment(const TrajectorySegment& segment, Step step);

}  // namespace drlab
