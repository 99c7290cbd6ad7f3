#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace drlab {

// Thin deterministic RNG wrapper. All randomness in the laboratory flows
// through explicit instances of this class so that every experiment is
// reproducible from its seed, independent of standard-library
// distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::int64_t below(std::int64_t n) {
    return static_cast<std::int64_t>(uniform() * static_cast<double>(n));
  }

  // Index sampled from a (not necessarily normalized) weight vector.
  std::size_t categorical(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

  // Standard normal via Box-Muller (kept for completeness of the toolkit).
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Derive an independent child stream (used to give each component of a
  // run its own stream while staying reproducible from one seed).
  Rng fork() { return Rng(engine_() ^ 0x9e3779b97f4a7c15ull); }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace drlab
