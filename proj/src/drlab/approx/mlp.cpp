#include "drlab/approx/mlp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drlab {

std::string MlpSpec::describe() const {
  std::ostringstream out;
  out << "mlp in=" << input_dim << " hidden=";
  if (hidden.empty()) out << "-";
  for (std::size_t i = 0; i < hidden.size(); ++i) {
    if (i > 0) out << ',';
    out << hidden[i];
  }
  out << " out=" << output_dim << " act=" << (tanh_output ? "tanh" : "linear");
  return out.str();
}

Mlp::Mlp(MlpSpec spec, Rng& rng) : spec_(std::move(spec)) {
  if (spec_.input_dim <= 0 || spec_.output_dim <= 0) {
    throw std::invalid_argument("mlp: dimensions must be positive");
  }
  for (const std::int32_t w : spec_.hidden) {
    if (w <= 0) throw std::invalid_argument("mlp: hidden widths must be positive");
  }
  widths_.push_back(spec_.input_dim);
  widths_.insert(widths_.end(), spec_.hidden.begin(), spec_.hidden.end());
  widths_.push_back(spec_.output_dim);

  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::int32_t fan_in = widths_[l];
    const std::int32_t fan_out = widths_[l + 1];
    if (l + 2 == widths_.size()) final_offset_ = static_cast<std::int64_t>(params_.size());
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::int32_t i = 0; i < fan_out * fan_in; ++i) {
      params_.push_back(rng.uniform(-limit, limit));
    }
    for (std::int32_t i = 0; i < fan_out; ++i) params_.push_back(0.0);
  }
}

namespace {

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace

std::vector<double> Mlp::forward(const std::vector<double>& input) const {
  if (static_cast<std::int32_t>(input.size()) != spec_.input_dim) {
    throw std::invalid_argument("mlp: input size mismatch");
  }
  std::vector<double> cur = input;
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::int32_t in_w = widths_[l];
    const std::int32_t out_w = widths_[l + 1];
    std::vector<double> next(out_w);
    for (std::int32_t o = 0; o < out_w; ++o) {
      double z = params_[p + static_cast<std::size_t>(out_w) * in_w + o];  // bias
      const std::size_t row = p + static_cast<std::size_t>(o) * in_w;
      for (std::int32_t i = 0; i < in_w; ++i) z += params_[row + i] * cur[i];
      const bool last = l + 2 == widths_.size();
      next[o] = last ? (spec_.tanh_output ? std::tanh(z) : z) : relu(z);
    }
    p += static_cast<std::size_t>(out_w) * in_w + out_w;
    cur = std::move(next);
  }
  return cur;
}

double Mlp::forward_scalar(const std::vector<double>& input) const {
  if (spec_.output_dim != 1) throw std::logic_error("mlp: forward_scalar needs output_dim 1");
  return forward(input)[0];
}

Mlp::Backprop Mlp::backward(const std::vector<double>& input,
                            const std::vector<double>& seed) const {
  if (static_cast<std::int32_t>(input.size()) != spec_.input_dim) {
    throw std::invalid_argument("mlp: input size mismatch");
  }
  if (static_cast<std::int32_t>(seed.size()) != spec_.output_dim) {
    throw std::invalid_argument("mlp: seed size mismatch");
  }

  // Forward pass, keeping each layer's activations.
  std::vector<std::vector<double>> acts;  // acts[l] = activations entering layer l
  acts.push_back(input);
  std::vector<std::vector<double>> pre;  // pre-activations per layer
  std::size_t p = 0;
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::int32_t in_w = widths_[l];
    const std::int32_t out_w = widths_[l + 1];
    std::vector<double> z(out_w);
    std::vector<double> a(out_w);
    const bool last = l + 2 == widths_.size();
    for (std::int32_t o = 0; o < out_w; ++o) {
      double s = params_[p + static_cast<std::size_t>(out_w) * in_w + o];
      const std::size_t row = p + static_cast<std::size_t>(o) * in_w;
      for (std::int32_t i = 0; i < in_w; ++i) s += params_[row + i] * acts[l][i];
      z[o] = s;
      a[o] = last ? (spec_.tanh_output ? std::tanh(s) : s) : relu(s);
    }
    p += static_cast<std::size_t>(out_w) * in_w + out_w;
    pre.push_back(std::move(z));
    acts.push_back(std::move(a));
  }

  Backprop result;
  result.output = acts.back();
  result.wrt_params.assign(params_.size(), 0.0);

  // Backward pass.
  std::vector<double> delta(seed.begin(), seed.end());
  if (spec_.tanh_output) {
    for (std::int32_t o = 0; o < spec_.output_dim; ++o) {
      const double y = acts.back()[o];
      delta[o] *= 1.0 - y * y;
    }
  }
  for (std::size_t l = widths_.size() - 1; l-- > 0;) {
    const std::int32_t in_w = widths_[l];
    const std::int32_t out_w = widths_[l + 1];
    p -= static_cast<std::size_t>(out_w) * in_w + out_w;
    std::vector<double> prev_delta(in_w, 0.0);
    for (std::int32_t o = 0; o < out_w; ++o) {
      const double d = delta[o];
      const std::size_t row = p + static_cast<std::size_t>(o) * in_w;
      result.wrt_params[p + static_cast<std::size_t>(out_w) * in_w + o] += d;  // bias
      for (std::int32_t i = 0; i < in_w; ++i) {
        result.wrt_params[row + i] += d * acts[l][i];
        prev_delta[i] += d * params_[row + i];
      }
    }
    if (l > 0) {
      // Gate through the preceding layer's rectifier.
      for (std::int32_t i = 0; i < in_w; ++i) {
        if (pre[l - 1][i] <= 0.0) prev_delta[i] = 0.0;
      }
    }
    delta = std::move(prev_delta);
  }
  result.wrt_input = std::move(delta);
  return result;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::invalid_argument("adam: size mismatch");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

FdReport fd_check_mlp(Mlp& net, Rng& rng, std::int32_t points, double step) {
  FdReport report;
  std::vector<double>& params = net.parameters();
  for (std::int32_t trial = 0; trial < points; ++trial) {
    std::vector<double> input(net.spec().input_dim);
    for (double& x : input) x = rng.uniform(-1.0, 1.0);
    std::vector<double> seed(net.spec().output_dim);
    for (double& s : seed) s = rng.uniform(-1.0, 1.0);
    const auto bp = net.backward(input, seed);

    auto weighted = [&](const std::vector<double>& out) {
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += seed[i] * out[i];
      return s;
    };
    auto relative = [](double analytic, double numeric) {
      const double scale = std::max({1.0, std::abs(analytic), std::abs(numeric)});
      return std::abs(analytic - numeric) / scale;
    };

    // One random parameter coordinate.
    {
      const auto idx = static_cast<std::size_t>(rng.below(params.size()));
      const double save = params[idx];
      params[idx] = save + step;
      const double up = weighted(net.forward(input));
      params[idx] = save - step;
      const double down = weighted(net.forward(input));
      params[idx] = save;
      const double numeric = (up - down) / (2.0 * step);
      report.max_rel_error = std::max(report.max_rel_error, relative(bp.wrt_params[idx], numeric));
    }
    // One random input coordinate.
    {
      const auto idx = static_cast<std::size_t>(rng.below(input.size()));
      const double save = input[idx];
      input[idx] = save + step;
      const double up = weighted(net.forward(input));
      input[idx] = save - step;
      const double down = weighted(net.forward(input));
      input[idx] = save;
      const double numeric = (up - down) / (2.0 * step);
      report.max_rel_error = std::max(report.max_rel_error, relative(bp.wrt_input[idx], numeric));
    }
    ++report.points;
  }
  return report;
}

}  // namespace drlab
