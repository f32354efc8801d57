#pragma once

// Differentiable pendulum swing-up. theta = 0 is upright; the classic-control
// constants are fixed below.

#include <numbers>
#include <string>

#include "templar/ops.hpp"

namespace templar::gym {

struct PendulumParams {
  double g = 10.0;
  double m = 1.0;
  double l = 1.0;
  double dt = 0.05;
  double max_torque = 2.0;
  double max_speed = 8.0;
};

struct PendulumState {
  Tensor theta;  // [...]
  Tensor omega;  // [...]
};

struct StepResult {
  PendulumState next;
  Tensor reward;
};

// theta - 2 pi round(theta / 2 pi); round has zero gradient, so the wrap
// passes the gradient straight through.
inline Tensor wrap_angle(const Tensor& theta, const Backend& b) {
  const DType dt = theta.dtype();
  const double two_pi = 2.0 * std::numbers::pi;
  const Tensor turns = b.round(b.div(theta, b.full(Shape{}, two_pi, dt)));
  return b.sub(theta, b.mul(turns, b.full(Shape{}, two_pi, dt)));
}

inline StepResult pendulum_step(const PendulumState& s, const Tensor& u, const PendulumParams& p = {},
                                const Backend* f = nullptr) {
  const Backend& b = get_framework(f, s.theta, s.omega, u);
  const DType dt = s.theta.dtype();
  auto k = [&](double v) { return b.full(Shape{}, v, dt); };

  const Tensor torque = b.clip(u, -p.max_torque, p.max_torque);
  const Tensor accel = b.add(b.mul(k(3.0 * p.g / (2.0 * p.l)), b.sin(s.theta)), b.mul(k(3.0 / (p.m * p.l * p.l)), torque));
  const Tensor omega = b.clip(b.add(s.omega, b.mul(accel, k(p.dt))), -p.max_speed, p.max_speed);
  const Tensor theta = b.add(s.theta, b.mul(omega, k(p.dt)));

  const Tensor w = wrap_angle(s.theta, b);
  const Tensor cost = b.add(b.add(b.mul(w, w), b.mul(k(0.1), b.mul(s.omega, s.omega))), b.mul(k(0.001), b.mul(torque, torque)));
  return {{theta, omega}, b.negative(cost)};
}

// Sum of rewards over torques [H]; the state is threaded through every step.
inline Tensor rollout(const PendulumState& initial, const Tensor& torques, const PendulumParams& p = {},
                      const Backend* f = nullptr) {
  const Backend& b = get_framework(f, initial.theta, initial.omega, torques);
  if (torques.rank() != 1 || torques.shape()[0] < 1) {
    throw InvalidArgument("rollout: torques must be [H] with H >= 1, got " + torques.shape().str());
  }
  const std::int64_t h = torques.shape()[0];
  PendulumState s = initial;
  Tensor total;
  for (std::int64_t i = 0; i < h; ++i) {
    const Tensor u = b.reshape(b.slice(torques, 0, i, i + 1), {});
    auto r = pendulum_step(s, u, p, &b);
    total = total.defined() ? b.add(total, r.reward) : r.reward;
    s = std::move(r.next);
  }
  return total;
}

}  // namespace templar::gym
