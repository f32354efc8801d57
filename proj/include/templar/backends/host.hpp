#pragma once

#include "templar/backends/array_backend.hpp"

namespace templar::backends {

// Reference eager backend over plain host arrays. No gradient support.
class HostBackend final : public ArrayBackend {
 public:
  std::string_view id() const override { return "host"; }

  Variable variable(const Tensor&) const override {
    throw UnsupportedError("the host backend does not support automatic differentiation (variable)");
  }

  GradientResult execute_with_gradients(const LossFn&, std::span<const Variable>) const override {
    throw UnsupportedError("the host backend does not support automatic differentiation (execute_with_gradients)");
  }

  std::vector<Variable> gradient_descent_update(std::span<const Variable>, std::span<const Tensor>,
                                                double) const override {
    throw UnsupportedError("the host backend does not support automatic differentiation (gradient_descent_update)");
  }

 protected:
  std::vector<Tensor> wrap(const OpDef&, std::span<const Tensor>, std::span<const Array>,
                           std::vector<Array> out) const override {
    std::vector<Tensor> t;
    t.reserve(out.size());
    for (auto& a : out) t.emplace_back(this, std::move(a));
    return t;
  }
};

}  // namespace templar::backends

namespace templar {

inline const Backend& host_backend() {
  static const backends::HostBackend instance;
  return instance;
}

}  // namespace templar
