#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drlab/core/rng.hpp"

namespace drlab {

// Architecture of a fully connected net: rectified-linear hidden layers,
// linear or tanh output. `hidden` may be empty (a single affine map).
struct MlpSpec {
  std::int32_t input_dim = 1;
  std::vector<std::int32_t> hidden;
  std::int32_t output_dim = 1;
  bool tanh_output = false;

  // One-line descriptor, e.g. "mlp in=5 hidden=64,64 out=1 act=tanh".
  std::string describe() const;
};

// Fully connected network with a flat parameter vector (per layer:
// row-major weights then biases) and exact reverse-mode gradients with
// respect to both parameters and inputs.
class Mlp {
 public:
  Mlp() = default;
  // Weights drawn uniformly from ±sqrt(6 / (fan_in + fan_out)), biases 0.
  Mlp(MlpSpec spec, Rng& rng);

  const MlpSpec& spec() const { return spec_; }
  std::int64_t parameter_count() const { return static_cast<std::int64_t>(params_.size()); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  std::vector<double> forward(const std::vector<double>& input) const;
  // Convenience for output_dim == 1 (throws std::logic_error otherwise).
  double forward_scalar(const std::vector<double>& input) const;

  struct Backprop {
    std::vector<double> output;      // forward values
    std::vector<double> wrt_params;  // d(output . seed) / d(parameters)
    std::vector<double> wrt_input;   // d(output . seed) / d(input)
  };
  // Gradient of the seed-weighted output sum; pass seed {1} for scalars.
  Backprop backward(const std::vector<double>& input, const std::vector<double>& seed) const;

  // Flat-vector range [offset, offset + count) of the output layer's
  // parameters (weights and biases).
  std::int64_t final_layer_offset() const { return final_offset_; }
  std::int64_t final_layer_count() const { return parameter_count() - final_offset_; }

 private:
  MlpSpec spec_;
  std::vector<std::int32_t> widths_;  // input, hidden..., output
  std::vector<double> params_;
  std::int64_t final_offset_ = 0;
};

// Per-parameter adaptive gradient descent with first/second moment
// accumulators and bias correction (step 3e-4 by default).
class Adam {
 public:
  explicit Adam(std::size_t n, double lr = 3e-4, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);

  // One descent step: params -= lr * mhat / (sqrt(vhat) + eps).
  void step(std::vector<double>& params, const std::vector<double>& grad);

  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  std::vector<double> m_, v_;
};

// Central finite-difference verification of Mlp gradients. Each trial
// draws a random input, a random output seed, and one random parameter
// and one random input coordinate; the analytic derivative must match
// the central difference within `tol`, where the error is measured
// relative to max(1, |analytic|, |numeric|). Returns the worst error.
struct FdReport {
  double max_rel_error = 0.0;
  std::int32_t points = 0;
};
FdReport fd_check_mlp(Mlp& net, Rng& rng, std::int32_t points, double step = 1e-6);

}  // namespace drlab
