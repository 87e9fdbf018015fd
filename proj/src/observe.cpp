// SPDX-License-Identifier: Apache-2.0

#include "acpr/observe.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "acpr/error.hpp"

namespace acpr {

namespace {

using enum StateParameter;
constexpr auto L = ParameterKind::linear;
constexpr auto A = ParameterKind::angular;

constexpr std::array<LayoutSlot, 9> kFull{{
    {x, L}, {x_dot, L}, {x_ddot, L},
    {theta_1, A}, {theta_dot_1, A}, {theta_ddot_1, A},
    {theta_2, A}, {theta_dot_2, A}, {theta_ddot_2, A},
}};

constexpr std::array<LayoutSlot, 3> kPartial{{{x, L}, {theta_1, A}, {theta_2, A}}};

}  // namespace

std::span<const LayoutSlot> observation_layout(ObservationMode mode) noexcept {
  if (mode == ObservationMode::full) return kFull;
  return kPartial;
}

std::size_t observation_size(ObservationMode mode) noexcept {
  return 2 * observation_layout(mode).size();
}

std::pair<double, double> encode_component(double value, ParameterKind kind) noexcept {
  // degrees / 60 == radians * 180 / (pi * 60) == radians * 3 / pi
  const double magnitude = kind == ParameterKind::linear
                               ? std::abs(value) / kLinearScale
                               : std::abs(value) * (180.0 / kAngularScaleDegrees) /
                                     std::numbers::pi;
  if (value > 0.0) return {magnitude, 0.0};
  if (value < 0.0) return {0.0, magnitude};
  return {0.0, 0.0};
}

double parameter_value(const CartPoleState& s, StateParameter p) noexcept {
  switch (p) {
    case x: return s.x;
    case x_dot: return s.x_dot;
    case x_ddot: return s.x_ddot;
    case theta_1: return s.poles[0].theta;
    case theta_dot_1: return s.poles[0].theta_dot;
    case theta_ddot_1: return s.poles[0].theta_ddot;
    case theta_2: return s.poles[1].theta;
    case theta_dot_2: return s.poles[1].theta_dot;
    case theta_ddot_2: return s.poles[1].theta_ddot;
  }
  return 0.0;
}

Observation encode_state(const CartPoleState& state, ObservationMode mode) {
  const auto layout = observation_layout(mode);
  Observation obs;
  obs.mode = mode;
  obs.values.reserve(2 * layout.size());
  for (const LayoutSlot& slot : layout) {
    const auto [pos, neg] = encode_component(parameter_value(state, slot.parameter), slot.kind);
    obs.values.push_back(pos);
    obs.values.push_back(neg);
  }
  return obs;
}

std::string_view to_string(ObservationMode mode) noexcept {
  return mode == ObservationMode::full ? "full" : "partial";
}

ObservationMode parse_observation_mode(std::string_view text) {
  if (text == "full") return ObservationMode::full;
  if (text == "partial") return ObservationMode::partial;
  throw ConfigError("observation must be \"full\" or \"partial\", got \"" +
                    std::string(text) + "\"");
}

}  // namespace acpr
