#include "readsim/mlp.hpp"

#include <cmath>
#include <string>

#include "readsim/errors.hpp"

namespace readsim {

Mlp::Mlp(std::vector<std::size_t> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2) throw ShapeMismatch("an MLP needs at least input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    offsets_.push_back(total);
    total += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

void Mlp::initialize(Rng& rng, double hidden_gain, double output_gain) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = sizes_[l];
    const auto out = sizes_[l + 1];
    const double gain = l + 1 == layers ? output_gain : hidden_gain;
    const double scale = gain / std::sqrt(static_cast<double>(in));
    double* w = params_.data() + offsets_[l];
    for (std::size_t i = 0; i < in * out; ++i) w[i] = scale * normal(rng);
    for (std::size_t i = 0; i < out; ++i) w[in * out + i] = 0.0;
  }
}

std::vector<double> Mlp::forward(std::span<const double> input) const {
  Cache cache;
  return forward(input, cache);
}

std::vector<double> Mlp::forward(std::span<const double> input, Cache& cache) const {
  if (input.size() != input_size()) {
    throw ShapeMismatch("expected " + std::to_string(input_size()) + " inputs, got " + std::to_string(input.size()));
  }
  const std::size_t layers = sizes_.size() - 1;
  cache.activations.resize(sizes_.size());
  cache.activations[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const auto in = sizes_[l];
    const auto out = sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    const double* b = w + in * out;
    const auto& x = cache.activations[l];
    auto& y = cache.activations[l + 1];
    y.resize(out);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = b[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += row[i] * x[i];
      y[o] = l + 1 == layers ? acc : std::tanh(acc);
    }
  }
  return cache.activations.back();
}

void Mlp::backward(const Cache& cache, std::span<const double> grad_output, std::span<double> grad) const {
  const std::size_t layers = sizes_.size() - 1;
  std::vector<double> delta(grad_output.begin(), grad_output.end());
  std::vector<double> next;
  for (std::size_t l = layers; l-- > 0;) {
    const auto in = sizes_[l];
    const auto out = sizes_[l + 1];
    const double* w = params_.data() + offsets_[l];
    double* gw = grad.data() + offsets_[l];
    double* gb = gw + in * out;
    const auto& x = cache.activations[l];
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      double* grow = gw + o * in;
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * x[i];
    }
    if (l == 0) break;
    next.assign(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = delta[o];
      const double* row = w + o * in;
      for (std::size_t i = 0; i < in; ++i) next[i] += d * row[i];
    }
    // Hidden layers are tanh: d tanh = 1 - a^2.
    for (std::size_t i = 0; i < in; ++i) next[i] *= 1.0 - x[i] * x[i];
    delta.swap(next);
  }
}

void adam_step(std::vector<double>& params, std::span<const double> grad, AdamState& state,
               const AdamConfig& config) {
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grad[i];
    state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

}  // namespace readsim
