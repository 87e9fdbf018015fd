// SPDX-License-Identifier: Apache-2.0

#include "acpr/rehearsal.hpp"

#include <gtest/gtest.h>

#include "acpr/error.hpp"
#include "retention.hpp"

namespace acpr {
namespace {

TrainExample real_example(std::size_t inputs, std::size_t outputs) {
  TrainExample ex;
  for (std::size_t i = 0; i < inputs; ++i) ex.input.push_back(0.1 * static_cast<double>(i + 1));
  ex.target.assign(outputs, 0.7);
  return ex;
}

TEST(Rehearsal, GenerationBasics) {
  const Network net = Network::initialize({6, 8, 2}, 3);
  Rng rng(1);
  EXPECT_TRUE(generate_pseudopatterns(net, 0, rng).empty());

  Rng a(5), b(5);
  const auto pa = generate_pseudopatterns(net, 12, a);
  const auto pb = generate_pseudopatterns(net, 12, b);
  ASSERT_EQ(pa.size(), 12u);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    EXPECT_EQ(pa[i].input, pb[i].input);
    EXPECT_EQ(pa[i].layer_outputs, pb[i].layer_outputs);
    for (double v : pa[i].input) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    ASSERT_EQ(pa[i].layer_outputs.layers.size(), 3u);
    EXPECT_EQ(pa[i].layer_outputs.layers[1].size(), 8u);
    EXPECT_EQ(pa[i].final_target(), predict(net, pa[i].input));
    EXPECT_EQ(pa[i].final_target(), pa[i].layer_outputs.layers.back());
  }

  Rng z(2);
  for (const auto& p : generate_pseudopatterns(Network::zeros({4, 3, 2}), 5, z))
    EXPECT_EQ(p.final_target(), (std::vector<double>{0.0, 0.0}));
}

TEST(Rehearsal, ReinitializationSchedule) {
  RehearsalConfig cfg;
  cfg.strategy = Strategy::batch;
  cfg.pseudo_count = 4;
  cfg.reinit_every = 50;
  Network actor = Network::initialize({6, 8, 2}, 1);
  Network critic = Network::initialize({6, 8, 1}, 2);
  RehearsalBuffer buf;
  Rng rng(3);
  EXPECT_TRUE(maybe_reinitialize(buf, 0, cfg, actor, critic, rng));
  EXPECT_EQ(buf.actor.size(), 4u);
  EXPECT_EQ(buf.critic.size(), 4u);
  const auto snapshot = buf.actor.front().input;

  actor = Network::initialize({6, 8, 2}, 9);
  EXPECT_FALSE(maybe_reinitialize(buf, 49, cfg, actor, critic, rng));
  EXPECT_EQ(buf.actor.front().input, snapshot);

  EXPECT_TRUE(maybe_reinitialize(buf, 50, cfg, actor, critic, rng));
  for (const auto& p : buf.actor) EXPECT_EQ(p.final_target(), predict(actor, p.input));
  for (const auto& p : buf.critic) EXPECT_EQ(p.final_target(), predict(critic, p.input));

  cfg.reinit_every = 1;
  for (std::size_t e = 51; e < 55; ++e) EXPECT_TRUE(maybe_reinitialize(buf, e, cfg, actor, critic, rng));

  cfg.apply_to = ApplyTo::critic;
  RehearsalBuffer only_critic;
  maybe_reinitialize(only_critic, 0, cfg, actor, critic, rng);
  EXPECT_TRUE(only_critic.actor.empty());
  EXPECT_EQ(only_critic.critic.size(), 4u);

  cfg.strategy = Strategy::none;
  RehearsalBuffer untouched;
  EXPECT_FALSE(maybe_reinitialize(untouched, 0, cfg, actor, critic, rng));
  EXPECT_TRUE(untouched.critic.empty());
}

TEST(Rehearsal, AssembleBatch) {
  const Network net = Network::initialize({6, 8, 2}, 4);
  Rng rng(7);
  const auto patterns = generate_pseudopatterns(net, 7, rng);
  TrainExample real = real_example(6, 2);
  real.weight = 0.5;
  const auto batch = assemble_batch(real, patterns);
  ASSERT_EQ(batch.size(), 8u);
  EXPECT_EQ(batch[0].input, real.input);
  EXPECT_EQ(batch[0].weight, 0.5);
  for (std::size_t i = 1; i < batch.size(); ++i) {
    EXPECT_EQ(batch[i].weight, 1.0);
    EXPECT_EQ(batch[i].target, predict(net, batch[i].input));
  }
  EXPECT_EQ(assemble_batch(real, {}).size(), 1u);
}

TEST(Rehearsal, OrthoWeights) {
  const std::vector<double> a{1, 0, 0}, b{0, 2, 0}, z{0, 0, 0};
  EXPECT_EQ(cosine_similarity(a, b), 0.0);
  EXPECT_EQ(cosine_similarity(a, z), 0.0);
  EXPECT_EQ(ortho_weight(a, b, 3.0), 1.0);
  EXPECT_EQ(ortho_weight(a, z, 0.5), 1.0);
  const std::vector<double> v{0.3, 0.1, 0.77};
  EXPECT_EQ(cosine_similarity(v, v), 1.0);
  EXPECT_EQ(ortho_weight(v, v, 1.0), 0.0);
  EXPECT_EQ(ortho_weight(v, v, 0.0), 1.0);

  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> p(5), q(5);
    for (auto& x : p) x = uniform(rng, -1, 1);
    for (auto& x : q) x = uniform(rng, -1, 1);
    const double w = ortho_weight(p, q, uniform(rng, 0, 4));
    EXPECT_GE(w, 0.0);
    EXPECT_LE(w, 1.0);
  }
}

TEST(Rehearsal, OrthoWithZeroExponentIsSequentialBatch) {
  const Network base = Network::initialize({6, 8, 2}, 21);
  Rng rng(4);
  const auto patterns = generate_pseudopatterns(Network::initialize({6, 8, 2}, 22), 5, rng);
  const TrainExample real = real_example(6, 2);

  Network ortho = base;
  orthogonality_corrected_update(ortho, real, patterns, 0.05, 0.0);

  Network sequential = base;
  for (const auto& ex : assemble_batch(real, patterns))
    train_batch(sequential, std::span(&ex, 1), 0.05);
  EXPECT_EQ(ortho, sequential);
}

TEST(Rehearsal, OrthoWithEmptyPatternsIsPlainStep) {
  const Network base = Network::initialize({6, 8, 2}, 5);
  const TrainExample real = real_example(6, 2);
  Network a = base, b = base;
  orthogonality_corrected_update(a, real, {}, 0.05, 1.0);
  train_batch(b, std::span(&real, 1), 0.05);
  EXPECT_EQ(a, b);
}

TEST(Rehearsal, OrthoSkipsCollinearPatterns) {
  const Network base = Network::initialize({6, 8, 2}, 6);
  const TrainExample real = real_example(6, 2);
  Pseudopattern twin;
  twin.input = real.input;
  twin.layer_outputs = forward(Network::initialize({6, 8, 2}, 7), twin.input);
  const std::vector<Pseudopattern> patterns(3, twin);

  RehearsalConfig cfg;
  cfg.strategy = Strategy::ortho;
  RehearsalBuffer buf;
  buf.actor = patterns;
  auto rule = make_update_rule(cfg, buf);
  Network rehearsed = base, plain = base;
  rule->train(NetRole::actor, rehearsed, real, 0.05);
  PlainUpdate().train(NetRole::actor, plain, real, 0.05);
  EXPECT_EQ(rehearsed, plain);
}

TEST(Rehearsal, UpdateRuleDispatch) {
  const Network base = Network::initialize({6, 8, 1}, 8);
  const TrainExample real = real_example(6, 1);
  Rng rng(3);
  RehearsalBuffer buf;
  buf.critic = generate_pseudopatterns(base, 4, rng);

  RehearsalConfig cfg;
  cfg.strategy = Strategy::batch;
  cfg.apply_to = ApplyTo::actor;
  Network unprotected = base, plain = base;
  make_update_rule(cfg, buf)->train(NetRole::critic, unprotected, real, 0.1);
  PlainUpdate().train(NetRole::critic, plain, real, 0.1);
  EXPECT_EQ(unprotected, plain);

  cfg.apply_to = ApplyTo::both;
  Network protected_net = base, batched = base;
  make_update_rule(cfg, buf)->train(NetRole::critic, protected_net, real, 0.1);
  train_batch(batched, assemble_batch(real, buf.critic), 0.1);
  EXPECT_EQ(protected_net, batched);
}

TEST(Rehearsal, ConfigParsing) {
  EXPECT_EQ(parse_strategy("batch"), Strategy::batch);
  EXPECT_EQ(parse_strategy("ortho"), Strategy::ortho);
  EXPECT_EQ(parse_apply_to("critic"), ApplyTo::critic);
  EXPECT_THROW(parse_strategy("replay"), ConfigError);
  EXPECT_THROW(parse_apply_to("neither"), ConfigError);
  RehearsalConfig cfg;
  cfg.reinit_every = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = RehearsalConfig{};
  cfg.ortho_exponent = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_FALSE(cfg.protects(NetRole::actor));
  cfg.strategy = Strategy::batch;
  cfg.apply_to = ApplyTo::critic;
  EXPECT_FALSE(cfg.protects(NetRole::actor));
  EXPECT_TRUE(cfg.protects(NetRole::critic));
}

// Seeds 1..5 of the shared forgetting experiment.
TEST(Rehearsal, BatchRehearsalReducesDrift) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = testing::run_retention(seed, Strategy::batch);
    EXPECT_GT(r.drift_none, 0.0);
    wins += r.drift_rehearsed < r.drift_none;
  }
  EXPECT_GE(wins, 4);
}

TEST(Rehearsal, OrthoRehearsalReducesDrift) {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = testing::run_retention(seed, Strategy::ortho);
    wins += r.drift_rehearsed < r.drift_none;
  }
  EXPECT_GE(wins, 4);
}

}  // namespace
}  // namespace acpr
