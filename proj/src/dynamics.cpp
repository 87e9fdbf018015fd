// SPDX-License-Identifier: Apache-2.0

#include "acpr/dynamics.hpp"

#include <cmath>
#include <string>

#include "acpr/error.hpp"

namespace acpr {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("physics.") + name + " must be positive and finite");
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw ConfigError(std::string("physics.") + name + " must be non-negative and finite");
}

double sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// The six integrated components; accelerations are not part of the ODE state.
struct Vec6 {
  double x, x_dot, th1, th1_dot, th2, th2_dot;
};

Vec6 pack(const CartPoleState& s) {
  return {s.x, s.x_dot, s.poles[0].theta, s.poles[0].theta_dot, s.poles[1].theta,
          s.poles[1].theta_dot};
}

CartPoleState unpack(const Vec6& v) {
  CartPoleState s;
  s.x = v.x;
  s.x_dot = v.x_dot;
  s.poles[0].theta = v.th1;
  s.poles[0].theta_dot = v.th1_dot;
  s.poles[1].theta = v.th2;
  s.poles[1].theta_dot = v.th2_dot;
  return s;
}

Vec6 as_vec(const StateDerivative& d) {
  return {d.x_dot, d.x_ddot, d.theta_dot[0], d.theta_ddot[0], d.theta_dot[1],
          d.theta_ddot[1]};
}

Vec6 axpy(const Vec6& y, double a, const Vec6& k) {
  return {y.x + a * k.x,         y.x_dot + a * k.x_dot, y.th1 + a * k.th1,
          y.th1_dot + a * k.th1_dot, y.th2 + a * k.th2, y.th2_dot + a * k.th2_dot};
}

// Unchecked right-hand side; callers validate.
StateDerivative rhs(const CartPoleState& s, double force, const PhysicsConfig& cfg) {
  const double g = cfg.gravity;
  double effective_force = 0.0;
  double effective_mass = 0.0;
  std::array<double, 2> pivot_damping{};
  for (std::size_t i = 0; i < 2; ++i) {
    const double m = cfg.pole_mass[i];
    const double half = 0.5 * cfg.pole_length[i];
    const double sin_t = std::sin(s.poles[i].theta);
    const double cos_t = std::cos(s.poles[i].theta);
    const double w = s.poles[i].theta_dot;
    pivot_damping[i] = cfg.pole_friction * w / (m * half);
    effective_force +=
        m * half * w * w * sin_t + 0.75 * m * cos_t * (pivot_damping[i] - g * sin_t);
    effective_mass += m * (1.0 - 0.75 * cos_t * cos_t);
  }
  const double total_mass = cfg.cart_mass + cfg.pole_mass[0] + cfg.pole_mass[1];
  const double friction = cfg.cart_friction * total_mass * g * sign(s.x_dot);

  StateDerivative d;
  d.x_dot = s.x_dot;
  d.x_ddot = (force - friction + effective_force) / (cfg.cart_mass + effective_mass);
  for (std::size_t i = 0; i < 2; ++i) {
    const double half = 0.5 * cfg.pole_length[i];
    const double sin_t = std::sin(s.poles[i].theta);
    const double cos_t = std::cos(s.poles[i].theta);
    d.theta_dot[i] = s.poles[i].theta_dot;
    d.theta_ddot[i] =
        -0.75 * (d.x_ddot * cos_t - g * sin_t + pivot_damping[i]) / half;
  }
  return d;
}

}  // namespace

bool CartPoleState::finite() const noexcept {
  bool ok = std::isfinite(x) && std::isfinite(x_dot) && std::isfinite(x_ddot);
  for (const auto& p : poles)
    ok = ok && std::isfinite(p.theta) && std::isfinite(p.theta_dot) &&
         std::isfinite(p.theta_ddot);
  return ok;
}

void PhysicsConfig::validate() const {
  require_positive(cart_mass, "cart_mass");
  require_positive(pole_mass[0], "pole_mass_1");
  require_positive(pole_mass[1], "pole_mass_2");
  require_positive(pole_length[0], "pole_length_1");
  require_positive(pole_length[1], "pole_length_2");
  if (pole_length[0] == pole_length[1])
    throw ConfigError("physics.pole_length_2 must differ from pole_length_1");
  require_positive(gravity, "gravity");
  require_positive(force_magnitude, "force_magnitude");
  require_positive(track_half_length, "track_half_length");
  require_positive(failure_angle, "failure_angle");
  require_positive(integration_substep, "integration_substep");
  require_positive(control_interval, "control_interval");
  require_non_negative(cart_friction, "cart_friction");
  require_non_negative(pole_friction, "pole_friction");
  const double ratio = control_interval / integration_substep;
  if (ratio < 0.5 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
    throw ConfigError(
        "physics.control_interval must be an integer multiple of integration_substep");
}

int PhysicsConfig::substeps_per_control() const {
  return static_cast<int>(std::lround(control_interval / integration_substep));
}

StateDerivative derivatives(const CartPoleState& state, double force,
                            const PhysicsConfig& cfg) {
  if (!state.finite() || !std::isfinite(force))
    throw InvalidStateError("derivatives: non-finite state or force");
  if (std::abs(force) > cfg.force_magnitude)
    throw ArgumentError("derivatives: |force| exceeds force_magnitude");
  return rhs(state, force, cfg);
}

std::optional<FailureCause> failure_cause(const CartPoleState& state,
                                          const PhysicsConfig& cfg) noexcept {
  if (std::abs(state.poles[0].theta) > cfg.failure_angle) return FailureCause::pole_1;
  if (std::abs(state.poles[1].theta) > cfg.failure_angle) return FailureCause::pole_2;
  if (std::abs(state.x) > cfg.track_half_length) return FailureCause::track;
  return std::nullopt;
}

double action_force(Action action, const PhysicsConfig& cfg) noexcept {
  return action == Action::push_right ? cfg.force_magnitude : -cfg.force_magnitude;
}

CartPoleState integrate(const CartPoleState& state, double force, double duration,
                        double substep, const PhysicsConfig& cfg) {
  if (!state.finite()) throw InvalidStateError("integrate: non-finite state");
  if (std::abs(force) > cfg.force_magnitude)
    throw ArgumentError("integrate: |force| exceeds force_magnitude");
  const long n = std::lround(duration / substep);
  Vec6 y = pack(state);
  for (long k = 0; k < n; ++k) {
    const auto f = [&](const Vec6& v) { return as_vec(rhs(unpack(v), force, cfg)); };
    const Vec6 k1 = f(y);
    const Vec6 k2 = f(axpy(y, 0.5 * substep, k1));
    const Vec6 k3 = f(axpy(y, 0.5 * substep, k2));
    const Vec6 k4 = f(axpy(y, substep, k3));
    y = {y.x + substep / 6.0 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
         y.x_dot + substep / 6.0 * (k1.x_dot + 2 * k2.x_dot + 2 * k3.x_dot + k4.x_dot),
         y.th1 + substep / 6.0 * (k1.th1 + 2 * k2.th1 + 2 * k3.th1 + k4.th1),
         y.th1_dot +
             substep / 6.0 * (k1.th1_dot + 2 * k2.th1_dot + 2 * k3.th1_dot + k4.th1_dot),
         y.th2 + substep / 6.0 * (k1.th2 + 2 * k2.th2 + 2 * k3.th2 + k4.th2),
         y.th2_dot +
             substep / 6.0 * (k1.th2_dot + 2 * k2.th2_dot + 2 * k3.th2_dot + k4.th2_dot)};
  }
  CartPoleState out = unpack(y);
  if (!out.finite()) throw InvalidStateError("integrate: state diverged");
  cache_passive_accelerations(out, cfg);
  return out;
}

void cache_passive_accelerations(CartPoleState& state, const PhysicsConfig& cfg) {
  const StateDerivative d = derivatives(state, 0.0, cfg);
  state.x_ddot = d.x_ddot;
  state.poles[0].theta_ddot = d.theta_ddot[0];
  state.poles[1].theta_ddot = d.theta_ddot[1];
}

StepResult step(const CartPoleState& state, Action action, const PhysicsConfig& cfg) {
  if (!state.finite()) throw InvalidStateError("step: non-finite state");
  if (check_failure(state, cfg))
    throw ProtocolError("step: called on a state that has already failed");
  StepResult r;
  r.next = integrate(state, action_force(action, cfg), cfg.control_interval,
                     cfg.integration_substep, cfg);
  r.cause = failure_cause(r.next, cfg);
  r.terminal = r.cause.has_value();
  r.reward = r.terminal ? -1.0 : 0.0;
  return r;
}

}  // namespace acpr
