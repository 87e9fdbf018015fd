// SPDX-License-Identifier: Apache-2.0

// Sign-split, normalized observation encoding.
//
// Parameter i occupies cells 2i (positive values) and 2i+1 (negative values);
// the unused cell is zero. Linear quantities are divided by 20, angular ones
// are converted to degrees and divided by 60. No clamping is applied.

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "acpr/dynamics.hpp"

namespace acpr {

enum class ObservationMode { full, partial };
enum class ParameterKind { linear, angular };

enum class StateParameter {
  x, x_dot, x_ddot,
  theta_1, theta_dot_1, theta_ddot_1,
  theta_2, theta_dot_2, theta_ddot_2,
};

struct LayoutSlot {
  StateParameter parameter;
  ParameterKind kind;
};

/// Full: [x, x_dot, x_ddot, th1, th1_dot, th1_ddot, th2, th2_dot, th2_ddot].
/// Partial: [x, th1, th2].
std::span<const LayoutSlot> observation_layout(ObservationMode mode) noexcept;

/// 18 in full mode, 6 in partial mode.
std::size_t observation_size(ObservationMode mode) noexcept;

struct Observation {
  std::vector<double> values;
  ObservationMode mode = ObservationMode::full;
};

inline constexpr double kLinearScale = 20.0;
inline constexpr double kAngularScaleDegrees = 60.0;

/// Returns (positive cell, negative cell).
std::pair<double, double> encode_component(double value, ParameterKind kind) noexcept;

double parameter_value(const CartPoleState& state, StateParameter p) noexcept;

Observation encode_state(const CartPoleState& state, ObservationMode mode);

std::string_view to_string(ObservationMode mode) noexcept;
/// Throws ConfigError on anything but "full" / "partial".
ObservationMode parse_observation_mode(std::string_view text);

}  // namespace acpr
