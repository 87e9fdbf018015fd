// SPDX-License-Identifier: Apache-2.0

// Cart with two hinged poles of different lengths on a bounded track.
//
// Sign convention: x grows to the right; a pole angle is positive when the
// pole leans toward +x (clockwise seen with +x to the right). Equations of
// motion are the usual double-pole benchmark model: rigid uniform poles
// pivoting on the cart, viscous pivot friction, Coulomb cart friction.

#pragma once

#include <array>
#include <optional>

namespace acpr {

struct PoleState {
  double theta = 0.0;       // rad from vertical
  double theta_dot = 0.0;   // rad/s
  double theta_ddot = 0.0;  // rad/s^2, cached from the last derivative evaluation
};

struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double x_ddot = 0.0;  // cached from the last derivative evaluation
  std::array<PoleState, 2> poles{};

  bool finite() const noexcept;
};

struct PhysicsConfig {
  double cart_mass = 1.0;
  std::array<double, 2> pole_mass{0.1, 0.01};
  std::array<double, 2> pole_length{1.0, 0.1};  // full length; pivot-to-centre is half
  double gravity = 9.81;
  double force_magnitude = 10.0;
  double track_half_length = 2.4;
  double failure_angle = 0.6283185307179586;  // 36 degrees
  double integration_substep = 0.001;
  double control_interval = 0.02;
  double cart_friction = 0.0;  // Coulomb coefficient on the cart's normal force
  double pole_friction = 0.0;  // viscous pivot coefficient

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// control_interval / integration_substep, rounded.
  int substeps_per_control() const;
};

enum class Action { push_left = 0, push_right = 1 };

enum class FailureCause { pole_1, pole_2, track };

/// Time derivatives of (x, x_dot, theta_1, theta_dot_1, theta_2, theta_dot_2).
struct StateDerivative {
  double x_dot = 0.0;
  double x_ddot = 0.0;
  std::array<double, 2> theta_dot{};
  std::array<double, 2> theta_ddot{};
};

/// Throws InvalidStateError on a non-finite state and ArgumentError when
/// |force| exceeds cfg.force_magnitude.
StateDerivative derivatives(const CartPoleState& state, double force,
                            const PhysicsConfig& cfg);

/// First failing condition in the order pole 1, pole 2, track; nullopt if none.
std::optional<FailureCause> failure_cause(const CartPoleState& state,
                                          const PhysicsConfig& cfg) noexcept;

inline bool check_failure(const CartPoleState& state,
                          const PhysicsConfig& cfg) noexcept {
  return failure_cause(state, cfg).has_value();
}

struct StepResult {
  CartPoleState next;
  double reward = 0.0;  // -1 on failure, 0 otherwise
  bool terminal = false;
  std::optional<FailureCause> cause;
};

double action_force(Action action, const PhysicsConfig& cfg) noexcept;

/// Advances one control interval with fixed-substep RK4 under constant force.
/// The returned state carries the passive accelerations of the end state (see
/// cache_passive_accelerations). Throws ProtocolError if `state` has already
/// failed.
StepResult step(const CartPoleState& state, Action action, const PhysicsConfig& cfg);

/// Same integration with an explicit force and substep; used by step().
CartPoleState integrate(const CartPoleState& state, double force, double duration,
                        double substep, const PhysicsConfig& cfg);

/// Stores the accelerations of `state` under zero applied force. These are what
/// the full observation reports: they describe the state itself rather than
/// echoing whichever push produced it, which the agent would otherwise learn
/// to key on.
void cache_passive_accelerations(CartPoleState& state, const PhysicsConfig& cfg);

}  // namespace acpr
