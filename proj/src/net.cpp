// SPDX-License-Identifier: Apache-2.0

#include "acpr/net.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "acpr/error.hpp"
#include "acpr/random.hpp"

namespace acpr {

namespace {

void check_sizes(const std::vector<std::size_t>& sizes) {
  if (sizes.size() < 2) throw ConfigError("network needs at least two layers");
  for (std::size_t s : sizes)
    if (s == 0) throw ConfigError("network layer sizes must be positive");
}

bool finite_all(const std::vector<double>& v) noexcept {
  for (double d : v)
    if (!std::isfinite(d)) return false;
  return true;
}

std::vector<DenseLayer> shaped_layers(const std::vector<std::size_t>& sizes) {
  std::vector<DenseLayer> layers;
  layers.reserve(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer d;
    d.fan_in = sizes[l];
    d.fan_out = sizes[l + 1];
    d.weights.assign(d.fan_in * d.fan_out, 0.0);
    d.biases.assign(d.fan_out, 0.0);
    layers.push_back(std::move(d));
  }
  return layers;
}

}  // namespace

void Gradients::add_scaled(const Gradients& other, double scale) {
  if (other.layers.size() != layers.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& a = layers[l];
    const auto& b = other.layers[l];
    if (a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size())
      throw ShapeError("gradient layer shape mismatch");
    for (std::size_t k = 0; k < a.weights.size(); ++k) a.weights[k] += scale * b.weights[k];
    for (std::size_t k = 0; k < a.biases.size(); ++k) a.biases[k] += scale * b.biases[k];
  }
}

bool Gradients::all_finite() const noexcept {
  for (const auto& l : layers)
    if (!finite_all(l.weights) || !finite_all(l.biases)) return false;
  return true;
}

Network::Network(std::vector<std::size_t> sizes)
    : sizes_(std::move(sizes)), layers_(shaped_layers(sizes_)) {}

Network Network::initialize(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  check_sizes(layer_sizes);
  Network net(std::move(layer_sizes));
  Rng rng(seed);
  for (auto& layer : net.layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.fan_in));
    for (double& w : layer.weights) w = uniform(rng, -bound, bound);
  }
  return net;
}

Network Network::zeros(std::vector<std::size_t> layer_sizes) {
  check_sizes(layer_sizes);
  return Network(std::move(layer_sizes));
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

bool Network::all_finite() const noexcept {
  for (const auto& l : layers_)
    if (!finite_all(l.weights) || !finite_all(l.biases)) return false;
  return true;
}

Gradients Network::zero_gradients() const { return Gradients{shaped_layers(sizes_)}; }

ActivationRecord forward(const Network& net, std::span<const double> input) {
  if (input.size() != net.input_size())
    throw ShapeError("forward: input has " + std::to_string(input.size()) +
                     " values, network expects " + std::to_string(net.input_size()));
  ActivationRecord rec;
  rec.layers.reserve(net.layers().size() + 1);
  rec.layers.emplace_back(input.begin(), input.end());
  const std::size_t last = net.layers().size() - 1;
  for (std::size_t l = 0; l <= last; ++l) {
    const DenseLayer& layer = net.layers()[l];
    const std::vector<double>& in = rec.layers.back();
    std::vector<double> out(layer.biases);
    for (std::size_t i = 0; i < layer.fan_in; ++i) {
      const double a = in[i];
      const double* row = &layer.weights[i * layer.fan_out];
      for (std::size_t j = 0; j < layer.fan_out; ++j) out[j] += a * row[j];
    }
    if (l != last)
      for (double& v : out) v = std::tanh(v);
    rec.layers.push_back(std::move(out));
  }
  return rec;
}

std::vector<double> predict(const Network& net, std::span<const double> input) {
  return forward(net, input).output();
}

void accumulate_grads(const Network& net, const TrainExample& example, Gradients& into) {
  if (example.target.size() != net.output_size())
    throw ShapeError("backprop: target has " + std::to_string(example.target.size()) +
                     " values, network outputs " + std::to_string(net.output_size()));
  if (into.layers.size() != net.layers().size())
    throw ShapeError("backprop: gradient structure does not match network");
  const ActivationRecord rec = forward(net, example.input);

  // delta = dL/d(pre-activation) of the current layer
  std::vector<double> delta(net.output_size());
  for (std::size_t j = 0; j < delta.size(); ++j)
    delta[j] = example.weight * (rec.output()[j] - example.target[j]);

  for (std::size_t l = net.layers().size(); l-- > 0;) {
    const DenseLayer& layer = net.layers()[l];
    DenseLayer& g = into.layers[l];
    const std::vector<double>& in = rec.layers[l];
    for (std::size_t i = 0; i < layer.fan_in; ++i) {
      double* grow = &g.weights[i * layer.fan_out];
      for (std::size_t j = 0; j < layer.fan_out; ++j) grow[j] += in[i] * delta[j];
    }
    for (std::size_t j = 0; j < layer.fan_out; ++j) g.biases[j] += delta[j];
    if (l == 0) break;
    // previous layer is a tanh hidden layer: d tanh = 1 - a^2
    std::vector<double> prev(layer.fan_in, 0.0);
    for (std::size_t i = 0; i < layer.fan_in; ++i) {
      const double* row = &layer.weights[i * layer.fan_out];
      double s = 0.0;
      for (std::size_t j = 0; j < layer.fan_out; ++j) s += row[j] * delta[j];
      prev[i] = s * (1.0 - in[i] * in[i]);
    }
    delta = std::move(prev);
  }
}

Gradients backprop_grads(const Network& net, const TrainExample& example) {
  Gradients g = net.zero_gradients();
  accumulate_grads(net, example, g);
  return g;
}

void sgd_update(Network& net, const Gradients& grads, double learning_rate) {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw ArgumentError("sgd_update: learning rate must be positive");
  if (grads.layers.size() != net.layers().size())
    throw ShapeError("sgd_update: gradient structure does not match network");
  for (std::size_t l = 0; l < grads.layers.size(); ++l)
    if (grads.layers[l].weights.size() != net.layers()[l].weights.size() ||
        grads.layers[l].biases.size() != net.layers()[l].biases.size())
      throw ShapeError("sgd_update: gradient layer shape mismatch");
  if (!grads.all_finite()) throw NumericError("sgd_update: non-finite gradient");
  for (std::size_t l = 0; l < grads.layers.size(); ++l) {
    auto& p = net.layers()[l];
    const auto& g = grads.layers[l];
    for (std::size_t k = 0; k < p.weights.size(); ++k) p.weights[k] -= learning_rate * g.weights[k];
    for (std::size_t k = 0; k < p.biases.size(); ++k) p.biases[k] -= learning_rate * g.biases[k];
  }
  if (!net.all_finite()) throw NumericError("sgd_update: parameters became non-finite");
}

void train_batch(Network& net, std::span<const TrainExample> batch, double learning_rate) {
  if (batch.empty()) throw ArgumentError("train_batch: empty batch");
  Gradients g = net.zero_gradients();
  double total_weight = 0.0;
  for (const TrainExample& ex : batch) {
    if (!(ex.weight >= 0.0)) throw ArgumentError("train_batch: negative example weight");
    total_weight += ex.weight;
    if (ex.weight > 0.0) accumulate_grads(net, ex, g);
  }
  if (total_weight == 0.0) return;
  if (total_weight != 1.0) {
    for (auto& l : g.layers) {
      for (double& w : l.weights) w /= total_weight;
      for (double& b : l.biases) b /= total_weight;
    }
  }
  sgd_update(net, g, learning_rate);
}

void save_network(const Network& net, std::ostream& out) {
  out << "acpr-network 1\nlayers " << net.layer_sizes().size();
  for (std::size_t s : net.layer_sizes()) out << ' ' << s;
  out << '\n' << std::setprecision(17);
  for (const auto& l : net.layers()) {
    for (double w : l.weights) out << w << '\n';
    for (double b : l.biases) out << b << '\n';
  }
  if (!out) throw IoError("save_network: write failed");
}

Network load_network(std::istream& in) {
  std::string magic, keyword;
  int version = 0;
  std::size_t count = 0;
  if (!(in >> magic >> version) || magic != "acpr-network" || version != 1)
    throw ConfigError("load_network: not an acpr-network v1 snapshot");
  if (!(in >> keyword >> count) || keyword != "layers" || count < 2 || count > 1024)
    throw ConfigError("load_network: bad layers header");
  std::vector<std::size_t> sizes(count);
  for (auto& s : sizes)
    if (!(in >> s)) throw ConfigError("load_network: bad layer size");
  Network net = Network::zeros(sizes);
  for (auto& l : net.layers()) {
    for (double& w : l.weights)
      if (!(in >> w)) throw ConfigError("load_network: truncated parameter list");
    for (double& b : l.biases)
      if (!(in >> b)) throw ConfigError("load_network: truncated parameter list");
  }
  return net;
}

}  // namespace acpr
