#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "readsim/random.hpp"

namespace readsim {

// Fully connected network with tanh hidden layers and a linear output.
// Parameters live in one flat vector: for each layer the row-major weight
// matrix (out x in) followed by the bias vector.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> layer_sizes);

  // Gaussian init with variance gain^2 / fan_in; the output layer uses
  // `output_gain` instead. Biases start at zero.
  void initialize(Rng& rng, double hidden_gain, double output_gain);

  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double>& parameters() { return params_; }
  const std::vector<double>& parameters() const { return params_; }

  // Activations of every layer, input first; filled by forward().
  struct Cache {
    std::vector<std::vector<double>> activations;
  };

  // Throws ShapeMismatch when input.size() != input_size().
  std::vector<double> forward(std::span<const double> input) const;
  std::vector<double> forward(std::span<const double> input, Cache& cache) const;

  // Accumulates d(loss)/d(params) into `grad` given d(loss)/d(output).
  void backward(const Cache& cache, std::span<const double> grad_output, std::span<double> grad) const;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }

  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Adaptive-moment optimizer state for one parameter vector.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void adam_step(std::vector<double>& params, std::span<const double> grad, AdamState& state,
               const AdamConfig& config);

}  // namespace readsim
