// SPDX-License-Identifier: Apache-2.0
// Forgetting experiment shared by the rehearsal unit tests and the acceptance
// suite.
//
// A [6, 16, 1] network first learns task A, whose inputs use only the first
// three components. It then trains for kInterferingSteps online steps on task
// B, whose inputs use only the last three. Drift is the mean squared change of
// the outputs on task A inputs. Pseudopatterns are taken right after task A.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "acpr/net.hpp"
#include "acpr/random.hpp"
#include "acpr/rehearsal.hpp"

namespace acpr::testing {

struct RetentionSetup {
  std::size_t inputs = 6;
  std::size_t hidden = 16;
  std::size_t task_size = 16;
  std::size_t task_a_epochs = 400;
  std::size_t interfering_steps = 500;
  std::size_t pseudo_count = 8;
  double learning_rate = 0.05;
};

struct RetentionResult {
  double drift_none = 0.0;
  double drift_rehearsed = 0.0;
};

inline std::vector<TrainExample> make_task(Rng& rng, const RetentionSetup& s, bool task_b) {
  std::vector<TrainExample> out;
  const std::size_t half = s.inputs / 2;
  for (std::size_t i = 0; i < s.task_size; ++i) {
    TrainExample ex;
    ex.input.assign(s.inputs, 0.0);
    double sum = 0.0;
    for (std::size_t j = 0; j < half; ++j) {
      const double v = uniform01(rng);
      ex.input[task_b ? half + j : j] = v;
      sum += (j % 2 ? -1.0 : 1.0) * v;
    }
    ex.target = {task_b ? 1.0 - 0.5 * sum : std::sin(3.0 * sum)};
    out.push_back(std::move(ex));
  }
  return out;
}

inline double output_drift(const Network& before, const Network& after,
                           const std::vector<TrainExample>& task) {
  double s = 0.0;
  for (const auto& ex : task) {
    const double d = predict(after, ex.input)[0] - predict(before, ex.input)[0];
    s += d * d;
  }
  return s / static_cast<double>(task.size());
}

inline RetentionResult run_retention(std::uint64_t seed, Strategy strategy,
                                     const RetentionSetup& s = {}) {
  Rng rng(derive_seed(seed, 1));
  const auto task_a = make_task(rng, s, false);
  const auto task_b = make_task(rng, s, true);

  Network trained = Network::initialize({s.inputs, s.hidden, 1}, derive_seed(seed, 2));
  for (std::size_t e = 0; e < s.task_a_epochs; ++e)
    for (const auto& ex : task_a) train_batch(trained, std::span(&ex, 1), s.learning_rate);

  Rng pattern_rng(derive_seed(seed, 3));
  const auto patterns = generate_pseudopatterns(trained, s.pseudo_count, pattern_rng);

  auto interfere = [&](bool rehearse) {
    Network net = trained;
    for (std::size_t k = 0; k < s.interfering_steps; ++k) {
      const TrainExample& real = task_b[k % task_b.size()];
      if (!rehearse) {
        train_batch(net, std::span(&real, 1), s.learning_rate);
      } else if (strategy == Strategy::batch) {
        const auto batch = assemble_batch(real, patterns);
        train_batch(net, batch, s.learning_rate);
      } else {
        orthogonality_corrected_update(net, real, patterns, s.learning_rate, 1.0);
      }
    }
    return net;
  };

  RetentionResult r;
  r.drift_none = output_drift(trained, interfere(false), task_a);
  r.drift_rehearsed = output_drift(trained, interfere(true), task_a);
  return r;
}

}  // namespace acpr::testing
