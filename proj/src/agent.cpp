// SPDX-License-Identifier: Apache-2.0

#include "acpr/agent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acpr/error.hpp"

namespace acpr {

void AgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("agent.gamma must lie in (0, 1]");
  if (!(actor_lr > 0.0) || !std::isfinite(actor_lr))
    throw ConfigError("agent.actor_lr must be positive");
  if (!(critic_lr > 0.0) || !std::isfinite(critic_lr))
    throw ConfigError("agent.critic_lr must be positive");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw ConfigError("agent.temperature must be positive");
  for (std::size_t h : actor_hidden)
    if (h == 0) throw ConfigError("agent.actor_hidden sizes must be positive");
  for (std::size_t h : critic_hidden)
    if (h == 0) throw ConfigError("agent.critic_hidden sizes must be positive");
}

std::vector<std::size_t> AgentConfig::actor_sizes(std::size_t input_size) const {
  std::vector<std::size_t> sizes{input_size};
  sizes.insert(sizes.end(), actor_hidden.begin(), actor_hidden.end());
  sizes.push_back(2);
  return sizes;
}

std::vector<std::size_t> AgentConfig::critic_sizes(std::size_t input_size) const {
  std::vector<std::size_t> sizes{input_size};
  sizes.insert(sizes.end(), critic_hidden.begin(), critic_hidden.end());
  sizes.push_back(1);
  return sizes;
}

void PlainUpdate::train(NetRole, Network& net, const TrainExample& example,
                        double learning_rate) {
  train_batch(net, std::span(&example, 1), learning_rate);
}

std::array<double, 2> softmax2(double logit_left, double logit_right, double temperature) {
  const double a = logit_left / temperature;
  const double b = logit_right / temperature;
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  const double z = ea + eb;
  return {ea / z, eb / z};
}

std::array<double, 2> policy_probs(const Network& actor, std::span<const double> obs,
                                   double temperature) {
  if (actor.output_size() != 2)
    throw ArgumentError("policy_probs: actor must have two outputs");
  const std::vector<double> logits = predict(actor, obs);
  return softmax2(logits[0], logits[1], temperature);
}

Action sample_action(const std::array<double, 2>& probs, Rng& rng) {
  return uniform01(rng) < probs[0] ? Action::push_left : Action::push_right;
}

double td_error(const Network& critic, const Transition& t, double gamma) {
  const double v = predict(critic, t.observation).front();
  const double v_next = t.terminal() ? 0.0 : predict(critic, *t.next_observation).front();
  return t.reward + gamma * v_next - v;
}

double learn_step(Network& actor, Network& critic, const Transition& t,
                  const AgentConfig& cfg, UpdateRule& rule) {
  const double v = predict(critic, t.observation).front();
  const double v_next = t.terminal() ? 0.0 : predict(critic, *t.next_observation).front();
  const double target = t.reward + cfg.gamma * v_next;
  const double delta = target - v;
  if (!std::isfinite(delta)) throw NumericError("learn_step: non-finite TD error");

  rule.train(NetRole::critic, critic, TrainExample{t.observation, {target}, 1.0},
             cfg.critic_lr);

  std::vector<double> logits = predict(actor, t.observation);
  logits[static_cast<std::size_t>(t.action)] += delta;
  rule.train(NetRole::actor, actor, TrainExample{t.observation, std::move(logits), 1.0},
             cfg.actor_lr);
  return delta;
}

ActorCritic make_agent(const AgentConfig& cfg, std::size_t input_size,
                       std::uint64_t actor_seed, std::uint64_t critic_seed) {
  cfg.validate();
  return {Network::initialize(cfg.actor_sizes(input_size), actor_seed),
          Network::initialize(cfg.critic_sizes(input_size), critic_seed)};
}

}  // namespace acpr
