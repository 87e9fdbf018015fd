// SPDX-License-Identifier: Apache-2.0

// Pseudorehearsal against catastrophic forgetting.
//
// A pseudopattern is a uniform-noise input in [0, 1]^n together with the
// activations the network produced for it when it was generated. Patterns are
// regenerated from the current networks every `reinit_every` episodes and are
// rehearsed alongside each real training example in one of two ways:
//
//   batch  - one real example plus every pseudopattern in a single
//            weight-normalized SGD step.
//   ortho  - one step on the real example, then one step per pseudopattern
//            weighted by (1 - |cos(real input, pattern input)|)^ortho_exponent,
//            so patterns orthogonal to the new input are rehearsed fully and
//            collinear ones are suppressed.

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "acpr/agent.hpp"
#include "acpr/net.hpp"
#include "acpr/random.hpp"

namespace acpr {

enum class Strategy { none, batch, ortho };
enum class ApplyTo { actor, critic, both };

std::string_view to_string(Strategy s) noexcept;
std::string_view to_string(ApplyTo a) noexcept;
/// Throw ConfigError on unknown names.
Strategy parse_strategy(std::string_view text);
ApplyTo parse_apply_to(std::string_view text);

struct RehearsalConfig {
  Strategy strategy = Strategy::none;
  std::size_t pseudo_count = 8;
  std::size_t reinit_every = 10;
  double ortho_exponent = 1.0;
  ApplyTo apply_to = ApplyTo::both;

  void validate() const;
  bool protects(NetRole role) const noexcept;
  bool operator==(const RehearsalConfig&) const = default;
};

struct Pseudopattern {
  std::vector<double> input;
  ActivationRecord layer_outputs;  // captured at generation time

  const std::vector<double>& final_target() const { return layer_outputs.output(); }
};

std::vector<Pseudopattern> generate_pseudopatterns(const Network& net, std::size_t count,
                                                   Rng& rng);

struct RehearsalBuffer {
  std::vector<Pseudopattern> actor;
  std::vector<Pseudopattern> critic;
  std::size_t episodes_since_regeneration = 0;

  const std::vector<Pseudopattern>& patterns(NetRole role) const {
    return role == NetRole::actor ? actor : critic;
  }
};

/// Regenerates the pattern list of every protected network when episode_index
/// is a multiple of cfg.reinit_every (and the strategy is not none). Returns
/// true if the buffer was regenerated.
bool maybe_reinitialize(RehearsalBuffer& buffer, std::size_t episode_index,
                        const RehearsalConfig& cfg, const Network& actor,
                        const Network& critic, Rng& rng);

/// [real, pattern_1 -> target_1, ..., pattern_k -> target_k], all weight 1
/// except the real example, which keeps its own weight.
std::vector<TrainExample> assemble_batch(const TrainExample& real,
                                         std::span<const Pseudopattern> patterns);

/// Cosine similarity; 0 when either vector is all zero.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// (1 - |cos(a, b)|)^exponent, always within [0, 1].
double ortho_weight(std::span<const double> real_input,
                    std::span<const double> pattern_input, double exponent);

void orthogonality_corrected_update(Network& net, const TrainExample& real,
                                    std::span<const Pseudopattern> patterns,
                                    double learning_rate, double ortho_exponent);

/// Update rule that rehearses the buffer's patterns according to cfg. Holds a
/// reference to `buffer`, which must outlive it.
class RehearsalUpdate final : public UpdateRule {
 public:
  RehearsalUpdate(RehearsalConfig cfg, const RehearsalBuffer& buffer);

  void train(NetRole role, Network& net, const TrainExample& example,
             double learning_rate) override;

 private:
  RehearsalConfig cfg_;
  const RehearsalBuffer& buffer_;
};

std::unique_ptr<UpdateRule> make_update_rule(const RehearsalConfig& cfg,
                                             const RehearsalBuffer& buffer);

}  // namespace acpr
