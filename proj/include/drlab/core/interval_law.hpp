#pragma once

#include <cstdint>
#include <vector>

namespace drlab {

// Distribution q_n of signal-interval lengths, kept in two equivalent
// forms: the raw pmf (used for sampling) and the hazard function
//   hazard(k) = P(n = k | n >= k),
// which is the conditional probability that an interval ends after
// exactly k steps given it has lasted k steps. Every Bellman recursion
// over intervals branches on this conditional, so it is precomputed.
class IntervalLaw {
 public:
  IntervalLaw() = default;

  // `pmf[i]` is the probability of length support[i]; support entries are
  // positive and strictly increasing. Throws std::invalid_argument if the
  // pmf does not sum to 1 within 1e-12 or the support is invalid.
  IntervalLaw(std::vector<std::int32_t> support, std::vector<double> pmf);

  // Point mass at a single length.
  static IntervalLaw fixed(std::int32_t n);

  std::int32_t max_n() const { return max_n_; }

  // q_n(n = k); zero off support.
  double pmf(std::int32_t k) const;

  // P(n = k | n >= k); defined for 1 <= k <= max_n, with hazard(max_n) = 1.
  double hazard(std::int32_t k) const;

  // 1 - hazard(k); the probability the interval continues past step k.
  double continue_prob(std::int32_t k) const { return 1.0 - hazard(k); }

  const std::vector<std::int32_t>& support() const { return support_; }
  const std::vector<double>& probs() const { return probs_; }

  // Inverse-CDF sample from a uniform u in [0,1).
  std::int32_t sample_from_uniform(double u) const;

  friend bool operator==(const IntervalLaw&, const IntervalLaw&) = default;

 private:
  std::vector<std::int32_t> support_;
  std::vector<double> probs_;
  std::vector<double> hazard_;  // hazard_[k-1] for k = 1..max_n
  std::int32_t max_n_ = 0;
};

}  // namespace drlab
