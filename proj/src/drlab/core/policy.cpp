#include "drlab/core/policy.hpp"

#include <cmath>
#include <stdexcept>

namespace drlab {

PolicyS::PolicyS(const DrmdpSpec& spec) {
  num_phases_ = spec.interval_law.max_n();
  rows_.resize(static_cast<std::size_t>(spec.num_states()) * num_phases_);
  for (StateId s = 0; s < spec.num_states(); ++s) {
    const auto n = spec.num_actions(s);
    std::vector<double> uni(n, 1.0 / n);
    for (std::int32_t ph = 0; ph < num_phases_; ++ph) {
      rows_[static_cast<std::size_t>(s) * num_phases_ + ph] = uni;
    }
  }
}

PolicyS PolicyS::uniform(const DrmdpSpec& spec) { return PolicyS(spec); }

double PolicyS::prob(StateId s, std::int32_t phase, ActionId a) const {
  return rows_.at(static_cast<std::size_t>(s) * num_phases_ + phase).at(a);
}

void PolicyS::set_row(StateId s, std::int32_t phase, std::vector<double> probs) {
  rows_.at(static_cast<std::size_t>(s) * num_phases_ + phase) = std::move(probs);
}

const std::vector<double>& PolicyS::row(StateId s, std::int32_t phase) const {
  return rows_.at(static_cast<std::size_t>(s) * num_phases_ + phase);
}

void PolicyS::set_deterministic(StateId s, std::int32_t phase, ActionId a) {
  auto& row = rows_.at(static_cast<std::size_t>(s) * num_phases_ + phase);
  std::fill(row.begin(), row.end(), 0.0);
  row.at(a) = 1.0;
}

void PolicyS::validate(const DrmdpSpec& spec) const {
  if (num_phases_ <= 0) throw std::invalid_argument("policy: no phases");
  if (rows_.size() != static_cast<std::size_t>(spec.num_states()) * num_phases_) {
    throw std::invalid_argument("policy: row count does not match spec");
  }
  for (StateId s = 0; s < spec.num_states(); ++s) {
    for (std::int32_t ph = 0; ph < num_phases_; ++ph) {
      const auto& r = row(s, ph);
      if (static_cast<std::int32_t>(r.size()) != spec.num_actions(s)) {
        throw std::invalid_argument("policy: row size mismatch at state " + spec.state_names[s]);
      }
      double total = 0.0;
      for (double p : r) {
        if (p < 0.0) throw std::invalid_argument("policy: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > kProbTolerance) {
        throw std::invalid_argument("policy: row does not sum to 1 at state " + spec.state_names[s]);
      }
    }
  }
}

double PolicyTau::prob(const Key& key, ActionId a) const {
  auto it = rows_.find(key);
  if (it == rows_.end()) throw std::out_of_range("history policy: undefined key");
  return it->second.at(a);
}

void PolicyTau::set_row(Key key, std::vector<double> probs) {
  rows_[std::move(key)] = std::move(probs);
}

void PolicyTau::set_deterministic(Key key, ActionId a, std::int32_t num_actions) {
  std::vector<double> row(num_actions, 0.0);
  row.at(a) = 1.0;
  rows_[std::move(key)] = std::move(row);
}

}  // namespace drlab
