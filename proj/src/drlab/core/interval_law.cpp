#include "drlab/core/interval_law.hpp"

#include <cmath>
#include <stdexcept>

namespace drlab {

IntervalLaw::IntervalLaw(std::vector<std::int32_t> support, std::vector<double> pmf)
    : support_(std::move(support)), probs_(std::move(pmf)) {
  if (support_.empty() || support_.size() != probs_.size()) {
    throw std::invalid_argument("interval law: support/pmf size mismatch or empty");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] <= 0) throw std::invalid_argument("interval law: lengths must be positive");
    if (i > 0 && support_[i] <= support_[i - 1]) {
      throw std::invalid_argument("interval law: support must be strictly increasing");
    }
    if (probs_[i] < 0.0) throw std::invalid_argument("interval law: negative probability");
    total += probs_[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("interval law: pmf must sum to 1 within 1e-12");
  }
  max_n_ = support_.back();

  // hazard(k) = q(k) / P(n >= k). Computed with the exact survival sums so
  // that reconstructing the pmf from hazards reproduces it within 1e-12.
  hazard_.assign(max_n_, 0.0);
  double survival = 1.0;  // P(n >= k) entering step k
  std::size_t idx = 0;
  for (std::int32_t k = 1; k <= max_n_; ++k) {
    double q = 0.0;
    if (idx < support_.size() && support_[idx] == k) {
      q = probs_[idx];
      ++idx;
    }
    hazard_[k - 1] = survival > 0.0 ? q / survival : 1.0;
    survival -= q;
  }
  hazard_[max_n_ - 1] = 1.0;  // an interval cannot outlive the support
}

IntervalLaw IntervalLaw::fixed(std::int32_t n) { return IntervalLaw({n}, {1.0}); }

double IntervalLaw::pmf(std::int32_t k) const {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i] == k) return probs_[i];
  }
  return 0.0;
}

double IntervalLaw::hazard(std::int32_t k) const {
  if (k < 1 || k > max_n_) throw std::out_of_range("interval law: hazard index out of range");
  return hazard_[k - 1];
}

std::int32_t IntervalLaw::sample_from_uniform(double u) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return support_[i];
  }
  return support_.back();
}

}  // namespace drlab
