// SPDX-License-Identifier: Apache-2.0

// Small fully-connected network: tanh hidden layers, identity output,
// weighted half-squared-error loss, plain SGD.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace acpr {

/// Dense layer parameters. weights is fan_in x fan_out, row-major:
/// weights[i * fan_out + j] connects input i to output j.
struct DenseLayer {
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  std::vector<double> weights;
  std::vector<double> biases;

  double& weight(std::size_t i, std::size_t j) { return weights[i * fan_out + j]; }
  double weight(std::size_t i, std::size_t j) const { return weights[i * fan_out + j]; }

  bool operator==(const DenseLayer&) const = default;
};

/// Post-activation outputs of every layer from one forward pass, input first.
struct ActivationRecord {
  std::vector<std::vector<double>> layers;

  const std::vector<double>& output() const { return layers.back(); }
  bool operator==(const ActivationRecord&) const = default;
};

struct TrainExample {
  std::vector<double> input;
  std::vector<double> target;
  double weight = 1.0;
};

/// Same shape as a network's parameters.
struct Gradients {
  std::vector<DenseLayer> layers;

  void add_scaled(const Gradients& other, double scale);
  bool all_finite() const noexcept;
};

class Network {
 public:
  Network() = default;

  /// Uniform weights in [-1/sqrt(fan_in), 1/sqrt(fan_in)], zero biases.
  /// Throws ConfigError for fewer than two layers or a zero-sized layer.
  static Network initialize(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

  /// All parameters zero.
  static Network zeros(std::vector<std::size_t> layer_sizes);

  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }

  std::vector<DenseLayer>& layers() noexcept { return layers_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  std::size_t parameter_count() const noexcept;
  bool all_finite() const noexcept;

  Gradients zero_gradients() const;

  bool operator==(const Network&) const = default;

 private:
  explicit Network(std::vector<std::size_t> sizes);

  std::vector<std::size_t> sizes_;
  std::vector<DenseLayer> layers_;
};

/// Throws ShapeError if input.size() != net.input_size().
ActivationRecord forward(const Network& net, std::span<const double> input);

/// Output layer only.
std::vector<double> predict(const Network& net, std::span<const double> input);

/// Exact gradient of 0.5 * weight * ||output - target||^2.
Gradients backprop_grads(const Network& net, const TrainExample& example);

/// Adds backprop_grads(net, example) into `into`.
void accumulate_grads(const Network& net, const TrainExample& example, Gradients& into);

/// params -= learning_rate * grads. Throws NumericError (leaving the network
/// untouched) when grads contain non-finite values, ArgumentError when
/// learning_rate <= 0, ShapeError on a shape mismatch.
void sgd_update(Network& net, const Gradients& grads, double learning_rate);

/// Weighted-mean gradient over the batch followed by one sgd_update.
/// A batch with zero total weight leaves the network unchanged.
void train_batch(Network& net, std::span<const TrainExample> batch, double learning_rate);

/// Text snapshot: "acpr-network 1", "layers <n> <sizes...>", then for every
/// layer its weights in row-major order followed by its biases, one value per
/// line printed with 17 significant digits.
void save_network(const Network& net, std::ostream& out);
/// Throws ConfigError on a malformed snapshot.
Network load_network(std::istream& in);

}  // namespace acpr
