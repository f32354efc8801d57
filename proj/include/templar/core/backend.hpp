#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "templar/core/host_value.hpp"
#include "templar/core/instrument.hpp"
#include "templar/core/tensor.hpp"

namespace templar {

using Axes = std::vector<std::int64_t>;

// Trainable leaf: the only mutable cell in the library, replaced wholesale by
// gradient_descent_update rather than mutated.
struct Variable {
  Tensor value;
  std::uint64_t id = 0;
};

struct GradientResult {
  Tensor loss;
  std::vector<Tensor> grads;  // aligned with the variables
  std::vector<Tensor> aux;    // remaining outputs of fn, undifferentiated
};

struct SvdTensors {
  Tensor u;
  Tensor d;
  Tensor vt;
};

// fn(variables) -> {loss, aux...}
using LossFn = std::function<std::vector<Tensor>(std::span<const Tensor>)>;

// Every name a backend must resolve.
inline constexpr std::array<std::string_view, 43> kCoreOps = {
    "zeros",     "ones",       "full",        "array",      "linspace",     "random_uniform", "cast",
    "reshape",   "transpose",  "expand_dims", "concatenate", "tile",        "slice",          "sin",
    "cos",       "tanh",       "abs",         "sqrt",       "round",        "floor",          "negative",
    "add",       "sub",        "mul",         "div",        "pow",          "maximum",        "minimum",
    "clip",      "reduce_sum", "reduce_mean", "reduce_min", "reduce_max",   "gather_nd",      "scatter_nd",
    "matmul",    "linear",     "inv",         "svd",        "to_host",      "variable",       "execute_with_gradients",
    "gradient_descent_update"};

// The framework template: one implementation of the unified op surface.
// Library code receives a Backend and calls ops on it; the handler picks one
// when none is given. Every op is pure; leading batch dimensions are
// processed independently.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string_view id() const = 0;

  bool resolves(std::string_view op) const {
    return std::find(kCoreOps.begin(), kCoreOps.end(), op) != kCoreOps.end();
  }

  // Executes a graph-resident op. Backend methods are an eager prologue
  // followed by one or more apply calls; captured graphs replay through here.
  virtual std::vector<Tensor> apply(const OpDef& def, std::span<const Tensor> inputs) const = 0;

  // creation
  virtual Tensor zeros(const Shape& shape, DType dtype = DType::float32) const = 0;
  virtual Tensor ones(const Shape& shape, DType dtype = DType::float32) const = 0;
  virtual Tensor full(const Shape& shape, double value, DType dtype = DType::float32) const = 0;
  virtual Tensor array(const HostValue& values, DType dtype = DType::float32) const = 0;
  virtual Tensor array(std::span<const double> values, const Shape& shape, DType dtype = DType::float32) const = 0;
  virtual Tensor linspace(double start, double stop, std::int64_t num, DType dtype = DType::float32) const = 0;
  virtual Tensor linspace(const Tensor& start, const Tensor& stop, std::int64_t num) const = 0;
  virtual Tensor random_uniform(double low, double high, const Shape& shape, std::uint64_t seed,
                                DType dtype = DType::float32) const = 0;

  virtual Tensor cast(const Tensor& x, std::string_view dtype_str) const = 0;

  // shape family; negative axes count from the end, -1 in reshape is inferred
  virtual Tensor reshape(const Tensor& x, const Axes& new_shape) const = 0;
  virtual Tensor transpose(const Tensor& x, const std::optional<Axes>& axes = std::nullopt) const = 0;
  virtual Tensor expand_dims(const Tensor& x, std::int64_t axis) const = 0;
  virtual Tensor concatenate(std::span<const Tensor> xs, std::int64_t axis) const = 0;
  virtual Tensor tile(const Tensor& x, const Axes& reps) const = 0;
  virtual Tensor slice(const Tensor& x, std::int64_t axis, std::int64_t start, std::int64_t stop) const = 0;

  // elementwise
  virtual Tensor sin(const Tensor& x) const = 0;
  virtual Tensor cos(const Tensor& x) const = 0;
  virtual Tensor tanh(const Tensor& x) const = 0;
  virtual Tensor abs(const Tensor& x) const = 0;
  virtual Tensor sqrt(const Tensor& x) const = 0;
  virtual Tensor round(const Tensor& x) const = 0;
  virtual Tensor floor(const Tensor& x) const = 0;
  virtual Tensor negative(const Tensor& x) const = 0;
  virtual Tensor add(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor sub(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor mul(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor div(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor pow(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor maximum(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor minimum(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor clip(const Tensor& x, double x_min, double x_max) const = 0;

  // reductions; axis omitted reduces everything
  virtual Tensor reduce_sum(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt,
                            bool keepdims = false) const = 0;
  virtual Tensor reduce_mean(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt,
                             bool keepdims = false) const = 0;
  virtual Tensor reduce_min(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt,
                            bool keepdims = false) const = 0;
  virtual Tensor reduce_max(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt,
                            bool keepdims = false) const = 0;

  // indexing
  virtual Tensor gather_nd(const Tensor& params, const Tensor& indices) const = 0;
  virtual Tensor scatter_nd(const Tensor& indices, const Tensor& updates, const Shape& out_shape,
                            std::string_view reduction = "sum") const = 0;

  // linear algebra over the trailing two dims
  virtual Tensor matmul(const Tensor& a, const Tensor& b) const = 0;
  virtual Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) const = 0;
  virtual Tensor inv(const Tensor& a) const = 0;
  virtual SvdTensors svd(const Tensor& x) const = 0;

  virtual HostValue to_host(const Tensor& x) const = 0;

  // gradients
  virtual Variable variable(const Tensor& x) const = 0;
  virtual GradientResult execute_with_gradients(const LossFn& fn, std::span<const Variable> vars) const = 0;
  virtual std::vector<Variable> gradient_descent_update(std::span<const Variable> vars,
                                                        std::span<const Tensor> grads, double lr) const = 0;
};

inline std::string_view Tensor::backend_id() const { return impl_->backend->id(); }

}  // namespace templar
