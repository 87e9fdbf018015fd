// SPDX-License-Identifier: Apache-2.0

#include "acpr/rehearsal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acpr/error.hpp"

namespace acpr {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::batch: return "batch";
    case Strategy::ortho: return "ortho";
  }
  return "?";
}

std::string_view to_string(ApplyTo a) noexcept {
  switch (a) {
    case ApplyTo::actor: return "actor";
    case ApplyTo::critic: return "critic";
    case ApplyTo::both: return "both";
  }
  return "?";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "none") return Strategy::none;
  if (text == "batch") return Strategy::batch;
  if (text == "ortho") return Strategy::ortho;
  throw ConfigError("rehearsal.strategy: unknown strategy \"" + std::string(text) +
                    "\" (expected none, batch or ortho)");
}

ApplyTo parse_apply_to(std::string_view text) {
  if (text == "actor") return ApplyTo::actor;
  if (text == "critic") return ApplyTo::critic;
  if (text == "both") return ApplyTo::both;
  throw ConfigError("rehearsal.apply_to: unknown target \"" + std::string(text) +
                    "\" (expected actor, critic or both)");
}

void RehearsalConfig::validate() const {
  if (reinit_every < 1) throw ConfigError("rehearsal.reinit_every must be at least 1");
  if (!(ortho_exponent >= 0.0) || !std::isfinite(ortho_exponent))
    throw ConfigError("rehearsal.ortho_exponent must be non-negative");
}

bool RehearsalConfig::protects(NetRole role) const noexcept {
  if (strategy == Strategy::none) return false;
  if (apply_to == ApplyTo::both) return true;
  return (apply_to == ApplyTo::actor) == (role == NetRole::actor);
}

std::vector<Pseudopattern> generate_pseudopatterns(const Network& net, std::size_t count,
                                                   Rng& rng) {
  std::vector<Pseudopattern> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Pseudopattern p;
    p.input.resize(net.input_size());
    for (double& v : p.input) v = uniform01(rng);
    p.layer_outputs = forward(net, p.input);
    out.push_back(std::move(p));
  }
  return out;
}

bool maybe_reinitialize(RehearsalBuffer& buffer, std::size_t episode_index,
                        const RehearsalConfig& cfg, const Network& actor,
                        const Network& critic, Rng& rng) {
  if (cfg.strategy == Strategy::none || episode_index % cfg.reinit_every != 0) {
    ++buffer.episodes_since_regeneration;
    return false;
  }
  buffer.actor = cfg.protects(NetRole::actor)
                     ? generate_pseudopatterns(actor, cfg.pseudo_count, rng)
                     : std::vector<Pseudopattern>{};
  buffer.critic = cfg.protects(NetRole::critic)
                      ? generate_pseudopatterns(critic, cfg.pseudo_count, rng)
                      : std::vector<Pseudopattern>{};
  buffer.episodes_since_regeneration = 0;
  return true;
}

std::vector<TrainExample> assemble_batch(const TrainExample& real,
                                         std::span<const Pseudopattern> patterns) {
  std::vector<TrainExample> batch;
  batch.reserve(1 + patterns.size());
  batch.push_back(real);
  for (const Pseudopattern& p : patterns) batch.push_back({p.input, p.final_target(), 1.0});
  return batch;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) makes identical vectors give exactly 1
  const double c = dot / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

double ortho_weight(std::span<const double> real_input,
                    std::span<const double> pattern_input, double exponent) {
  const double c = std::abs(cosine_similarity(real_input, pattern_input));
  return std::pow(1.0 - c, exponent);
}

void orthogonality_corrected_update(Network& net, const TrainExample& real,
                                    std::span<const Pseudopattern> patterns,
                                    double learning_rate, double ortho_exponent) {
  train_batch(net, std::span(&real, 1), learning_rate);
  for (const Pseudopattern& p : patterns) {
    const double w = ortho_weight(real.input, p.input, ortho_exponent);
    if (w == 0.0) continue;
    sgd_update(net, backprop_grads(net, TrainExample{p.input, p.final_target(), w}),
               learning_rate);
  }
}

RehearsalUpdate::RehearsalUpdate(RehearsalConfig cfg, const RehearsalBuffer& buffer)
    : cfg_(cfg), buffer_(buffer) {
  cfg_.validate();
}

void RehearsalUpdate::train(NetRole role, Network& net, const TrainExample& example,
                            double learning_rate) {
  if (!cfg_.protects(role)) {
    train_batch(net, std::span(&example, 1), learning_rate);
    return;
  }
  const auto& patterns = buffer_.patterns(role);
  switch (cfg_.strategy) {
    case Strategy::none:
      train_batch(net, std::span(&example, 1), learning_rate);
      break;
    case Strategy::batch: {
      const auto batch = assemble_batch(example, patterns);
      train_batch(net, batch, learning_rate);
      break;
    }
    case Strategy::ortho:
      orthogonality_corrected_update(net, example, patterns, learning_rate,
                                     cfg_.ortho_exponent);
      break;
  }
}

std::unique_ptr<UpdateRule> make_update_rule(const RehearsalConfig& cfg,
                                             const RehearsalBuffer& buffer) {
  cfg.validate();
  if (cfg.strategy == Strategy::none) return std::make_unique<PlainUpdate>();
  return std::make_unique<RehearsalUpdate>(cfg, buffer);
}

}  // namespace acpr
