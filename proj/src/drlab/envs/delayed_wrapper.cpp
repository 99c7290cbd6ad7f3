#include "drlab/envs/delayed_wrapper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drlab {

DelayedRewardWrapper::DelayedRewardWrapper(DenseEnv& inner, RewardKind kind, IntervalLaw law,
                                           std::int32_t overlap)
    : inner_(inner), kind_(kind), law_(std::move(law)), overlap_(overlap) {
  if (kind != RewardKind::Sum && kind != RewardKind::Max && kind != RewardKind::Square) {
    throw std::invalid_argument("delayed wrapper: aggregation must be Sum, Max, or Square");
  }
  if (overlap < 0) throw std::invalid_argument("delayed wrapper: overlap must be nonnegative");
  if (overlap > 0 && kind != RewardKind::Sum) {
    throw std::invalid_argument("delayed wrapper: only Sum supports overlapping intervals");
  }
}

std::vector<double> DelayedRewardWrapper::reset(Rng& rng) {
  std::vector<double> state = inner_.reset(rng);
  done_ = false;
  phase_ = 0;
  current_len_ = law_.sample_from_uniform(rng.uniform());
  step_index_ = 0;
  pending_.clear();
  window_.clear();
  window_start_ = 0;
  next_unpaid_ = -static_cast<std::int64_t>(overlap_);
  dropped_reward_ = 0.0;
  dropped_steps_ = 0;
  return state;
}

double DelayedRewardWrapper::interval_aggregate() const {
  if (kind_ == RewardKind::Max) {
    double best = pending_.front();
    for (const double r : pending_) best = std::max(best, r);
    return 10.0 * best;
  }
  // Square: 4x the interval mean, squared (sign kept) once |mean| >= 1.
  double total = 0.0;
  for (const double r : pending_) total += r;
  const double mean = total / static_cast<double>(pending_.size());
  if (std::abs(mean) < 1.0) return 4.0 * mean;
  return (mean < 0.0 ? -4.0 : 4.0) * mean * mean;
}

DelayedRewardWrapper::WrappedStep DelayedRewardWrapper::step(const std::vector<double>& action,
                                                            Rng& rng) {
  if (done_) throw std::logic_error("delayed wrapper: episode already finished");
  const DenseEnv::StepResult inner = inner_.step(action);
  ++step_index_;

  WrappedStep result;
  result.state = inner.state;
  result.phase = phase_;
  result.done = inner.done;
  result.interval_end = phase_ == current_len_ - 1 || inner.done;

  if (kind_ == RewardKind::Sum) {
    window_.push_back(inner.reward);
  } else {
    pending_.push_back(inner.reward);
  }

  if (result.interval_end) {
    if (kind_ == RewardKind::Sum) {
      // Pay the interval's window, shifted `overlap` steps into the past;
      // indices before the episode count as zero.
      const std::int64_t pay_end = step_index_ - overlap_;
      double total = 0.0;
      for (std::int64_t j = std::max<std::int64_t>(next_unpaid_, 0); j < pay_end; ++j) {
        total += window_[static_cast<std::size_t>(j - window_start_)];
      }
      result.reward = total;
      next_unpaid_ = std::max(next_unpaid_, pay_end);
      while (window_start_ < next_unpaid_ && !window_.empty()) {
        window_.pop_front();
        ++window_start_;
      }
    } else {
      result.reward = interval_aggregate();
      pending_.clear();
    }
    phase_ = 0;
    if (!inner.done) current_len_ = law_.sample_from_uniform(rng.uniform());
  } else {
    ++phase_;
  }

  if (inner.done) {
    if (kind_ == RewardKind::Sum) {
      // The final `overlap` steps were never paid; tally them.
      for (std::int64_t j = std::max<std::int64_t>(next_unpaid_, 0); j < step_index_; ++j) {
        dropped_reward_ += window_[static_cast<std::size_t>(j - window_start_)];
        ++dropped_steps_;
      }
    }
    done_ = true;
  }
  return result;
}

}  // namespace drlab
