// SPDX-License-Identifier: Apache-2.0

// Actor-critic agent: a softmax policy over {push_left, push_right} computed
// from the actor's two output logits, a scalar state value from the critic,
// and semi-gradient TD(0) updates driven by the TD error.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "acpr/dynamics.hpp"
#include "acpr/net.hpp"
#include "acpr/random.hpp"

namespace acpr {

struct AgentConfig {
  double gamma = 0.95;
  double actor_lr = 0.01;
  double critic_lr = 0.01;
  double temperature = 1.0;
  std::vector<std::size_t> actor_hidden{16};
  std::vector<std::size_t> critic_hidden{16};

  void validate() const;
  /// input, hidden..., 2
  std::vector<std::size_t> actor_sizes(std::size_t input_size) const;
  /// input, hidden..., 1
  std::vector<std::size_t> critic_sizes(std::size_t input_size) const;
};

struct Transition {
  std::vector<double> observation;
  Action action = Action::push_left;
  double reward = 0.0;
  std::optional<std::vector<double>> next_observation;  // empty iff terminal

  bool terminal() const noexcept { return !next_observation.has_value(); }
};

enum class NetRole { actor, critic };

/// How a single real training example is applied to a network. The plain rule
/// takes one SGD step on the example; rehearsal rules mix in pseudo-examples.
class UpdateRule {
 public:
  virtual ~UpdateRule() = default;
  virtual void train(NetRole role, Network& net, const TrainExample& example,
                     double learning_rate) = 0;
};

class PlainUpdate final : public UpdateRule {
 public:
  void train(NetRole role, Network& net, const TrainExample& example,
             double learning_rate) override;
};

/// softmax(logits / temperature). Throws ShapeError on a size mismatch and
/// ArgumentError if the actor does not have exactly two outputs.
std::array<double, 2> policy_probs(const Network& actor, std::span<const double> obs,
                                   double temperature);

std::array<double, 2> softmax2(double logit_left, double logit_right, double temperature);

/// Inverse-CDF draw: push_left iff u < probs[0], with u uniform in [0, 1).
Action sample_action(const std::array<double, 2>& probs, Rng& rng);

/// r + gamma * V(s') - V(s), with V(s') = 0 for terminal transitions.
double td_error(const Network& critic, const Transition& t, double gamma);

/// One online update of both networks. The critic regresses V(s) toward the
/// fixed bootstrap target r + gamma * V(s'); the actor regresses the taken
/// action's logit toward (logit + delta), leaving the other head's target at
/// its current value. Returns delta.
///
/// With no rehearsal the taken action's probability at `observation` moves in
/// the direction of delta's sign provided actor_lr * ||grad logit||^2 stays
/// well below 1; for the default 16-unit actor on encoded observations
/// (components in [0, 1]) actor_lr <= 0.05 is enough.
double learn_step(Network& actor, Network& critic, const Transition& t,
                  const AgentConfig& cfg, UpdateRule& rule);

struct ActorCritic {
  Network actor;
  Network critic;
};

ActorCritic make_agent(const AgentConfig& cfg, std::size_t input_size,
                       std::uint64_t actor_seed, std::uint64_t critic_seed);

}  // namespace acpr
