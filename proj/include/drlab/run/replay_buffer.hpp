#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "drlab/approx/records.hpp"
#include "drlab/core/rng.hpp"

namespace drlab {

// Fixed-capacity experience store with strict first-in-first-out
// eviction: once full, every insertion overwrites the oldest record and
// the size stays exactly at capacity. Batches are drawn uniformly at
// random with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::int64_t capacity) : capacity_(capacity) {
    if (capacity <= 0) throw std::invalid_argument("replay buffer: capacity must be positive");
    records_.reserve(static_cast<std::size_t>(capacity));
  }

  std::int64_t capacity() const { return capacity_; }
  std::int64_t size() const { return static_cast<std::int64_t>(records_.size()); }

  void add(ReplayRecord record) {
    if (size() < capacity_) {
      records_.push_back(std::move(record));
    } else {
      records_[static_cast<std::size_t>(next_slot_)] = std::move(record);
      next_slot_ = (next_slot_ + 1) % capacity_;
    }
  }

  const ReplayRecord& at(std::int64_t index) const {
    return records_.at(static_cast<std::size_t>(index));
  }

  std::vector<ReplayRecord> sample(std::int32_t batch_size, Rng& rng) const {
    if (batch_size <= 0) throw std::invalid_argument("replay buffer: batch size must be positive");
    if (records_.empty()) throw std::logic_error("replay buffer: sampling from an empty buffer");
    std::vector<ReplayRecord> batch;
    batch.reserve(static_cast<std::size_t>(batch_size));
    for (std::int32_t i = 0; i < batch_size; ++i) {
      batch.push_back(records_[static_cast<std::size_t>(rng.below(size()))]);
    }
    return batch;
  }

 private:
  std::int64_t capacity_;
  std::int64_t next_slot_ = 0;  // oldest record once the buffer is full
  std::vector<ReplayRecord> records_;
};

}  // namespace drlab
