#pragma once

// Pendulum swing-up by gradient ascent on an open-loop torque sequence,
// starting from zero torques with the pendulum hanging down.

#include <numbers>
#include <vector>

#include "templar/gym/pendulum.hpp"

namespace templar::demo {

struct SwingUpOptions {
  std::int64_t horizon = 50;
  std::int64_t iters = 200;
  double lr = 0.05;
  std::uint64_t seed = 0;  // the start state and torques are fixed; no randomness
};

struct SwingUpReport {
  std::vector<double> rewards;  // cumulative reward before each update
  double final_reward = 0;      // after the last update
  double baseline = 0;          // zero torques

  double improvement() const { return (final_reward - baseline) / std::abs(baseline); }
};

inline SwingUpReport run_pendulum(const SwingUpOptions& opt, const Backend& f) {
  if (opt.horizon < 1) throw InvalidArgument("pendulum: horizon must be >= 1");
  if (opt.iters < 0) throw InvalidArgument("pendulum: iters must be >= 0");
  const DType dt = DType::float64;
  const gym::PendulumState start{f.full(Shape{}, std::numbers::pi, dt), f.zeros(Shape{}, dt)};
  Variable torques = f.variable(f.zeros(Shape{opt.horizon}, dt));

  auto objective = [&](std::span<const Tensor> xs) {
    return std::vector<Tensor>{f.negative(gym::rollout(start, xs[0], {}, &f))};
  };
  auto reward_of = [&](const Variable& v) {
    return f.to_host(gym::rollout(start, v.value, {}, &f)).flatten()[0];
  };

  SwingUpReport report;
  report.baseline = reward_of(torques);
  for (std::int64_t i = 0; i < opt.iters; ++i) {
    auto res = f.execute_with_gradients(objective, std::span<const Variable>(&torques, 1));
    report.rewards.push_back(-f.to_host(res.loss).flatten()[0]);
    torques = f.gradient_descent_update(std::span<const Variable>(&torques, 1), res.grads, opt.lr)[0];
  }
  report.final_reward = reward_of(torques);
  return report;
}

}  // namespace templar::demo
