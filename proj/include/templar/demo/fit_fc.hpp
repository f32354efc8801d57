#pragma once

// One-unit tanh model fitted to x = 1 -> 1 with plain gradient descent.

#include <cmath>
#include <vector>

#include "templar/ops.hpp"

namespace templar::demo {

class FcModel {
 public:
  FcModel(const Backend& f, std::uint64_t seed, DType dt = DType::float32) : f_(f) {
    const double w0lim = std::sqrt(6.0 / (1.0 + 1.0));
    v.push_back(f.variable(f.random_uniform(-w0lim, w0lim, Shape{1, 1}, seed, dt)));
    v.push_back(f.variable(f.zeros(Shape{1}, dt)));
  }

  Tensor call(const Tensor& x, std::span<const Tensor> params) const {
    return f_.tanh(f_.linear(x, params[0], params[1]));
  }

  std::vector<Variable> v;  // {w0 (1, 1), b0 (1)}

 private:
  const Backend& f_;
};

struct FitOptions {
  double lr = 1e-4;
  std::int64_t iters = 100;
  std::uint64_t seed = 0;
};

// Loss before each update, one entry per iteration.
inline std::vector<double> run_fit_fc(const FitOptions& opt, const Backend& f) {
  if (opt.iters < 0) throw InvalidArgument("fit-fc: iters must be >= 0");
  FcModel model(f, opt.seed);
  const Tensor x_in = f.array(HostValue{1.0});
  const Tensor target = f.array(HostValue{1.0});
  std::vector<double> losses;
  for (std::int64_t i = 0; i < opt.iters; ++i) {
    auto res = f.execute_with_gradients(
        [&](std::span<const Tensor> v) {
          const Tensor err = f.sub(model.call(x_in, v), target);
          return std::vector<Tensor>{f.reduce_sum(f.mul(err, err))};
        },
        model.v);
    losses.push_back(f.to_host(res.loss).flatten()[0]);
    model.v = f.gradient_descent_update(model.v, res.grads, opt.lr);
  }
  return losses;
}

}  // namespace templar::demo
