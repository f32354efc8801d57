#pragma once

// Backend-agnostic entry points. Each resolves a backend through the handler
// and delegates in one line; `f` overrides every other selection mechanism.

#include "templar/handler.hpp"

namespace templar {

inline Tensor zeros(const Shape& shape, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).zeros(shape, dtype); }
inline Tensor ones(const Shape& shape, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).ones(shape, dtype); }
inline Tensor full(const Shape& shape, double value, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).full(shape, value, dtype); }
inline Tensor array(const HostValue& values, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).array(values, dtype); }
inline Tensor array(std::span<const double> values, const Shape& shape, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).array(values, shape, dtype); }
inline Tensor linspace(double start, double stop, std::int64_t num, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).linspace(start, stop, num, dtype); }
inline Tensor linspace(const Tensor& start, const Tensor& stop, std::int64_t num, const Backend* f = nullptr) { return get_framework(f, start, stop).linspace(start, stop, num); }
inline Tensor random_uniform(double low, double high, const Shape& shape, std::uint64_t seed, DType dtype = DType::float32, const Backend* f = nullptr) { return get_framework(f).random_uniform(low, high, shape, seed, dtype); }

inline Tensor cast(const Tensor& x, std::string_view dtype_str, const Backend* f = nullptr) { return get_framework(f, x).cast(x, dtype_str); }

inline Tensor reshape(const Tensor& x, const Axes& new_shape, const Backend* f = nullptr) { return get_framework(f, x).reshape(x, new_shape); }
inline Tensor transpose(const Tensor& x, const std::optional<Axes>& axes = std::nullopt, const Backend* f = nullptr) { return get_framework(f, x).transpose(x, axes); }
inline Tensor expand_dims(const Tensor& x, std::int64_t axis, const Backend* f = nullptr) { return get_framework(f, x).expand_dims(x, axis); }
inline Tensor concatenate(std::span<const Tensor> xs, std::int64_t axis, const Backend* f = nullptr) { return get_framework(f, xs).concatenate(xs, axis); }
inline Tensor concatenate(std::initializer_list<Tensor> xs, std::int64_t axis, const Backend* f = nullptr) { return concatenate(std::span<const Tensor>(xs.begin(), xs.size()), axis, f); }
inline Tensor tile(const Tensor& x, const Axes& reps, const Backend* f = nullptr) { return get_framework(f, x).tile(x, reps); }
inline Tensor slice(const Tensor& x, std::int64_t axis, std::int64_t start, std::int64_t stop, const Backend* f = nullptr) { return get_framework(f, x).slice(x, axis, start, stop); }

inline Tensor sin(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).sin(x); }
inline Tensor cos(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).cos(x); }
inline Tensor tanh(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).tanh(x); }
inline Tensor abs(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).abs(x); }
inline Tensor sqrt(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).sqrt(x); }
inline Tensor round(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).round(x); }
inline Tensor floor(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).floor(x); }
inline Tensor negative(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).negative(x); }
inline Tensor add(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).add(a, b); }
inline Tensor sub(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).sub(a, b); }
inline Tensor mul(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).mul(a, b); }
inline Tensor div(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).div(a, b); }
inline Tensor pow(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).pow(a, b); }
inline Tensor maximum(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).maximum(a, b); }
inline Tensor minimum(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).minimum(a, b); }
inline Tensor clip(const Tensor& x, double x_min, double x_max, const Backend* f = nullptr) { return get_framework(f, x).clip(x, x_min, x_max); }

inline Tensor reduce_sum(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt, bool keepdims = false, const Backend* f = nullptr) { return get_framework(f, x).reduce_sum(x, axis, keepdims); }
inline Tensor reduce_mean(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt, bool keepdims = false, const Backend* f = nullptr) { return get_framework(f, x).reduce_mean(x, axis, keepdims); }
inline Tensor reduce_min(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt, bool keepdims = false, const Backend* f = nullptr) { return get_framework(f, x).reduce_min(x, axis, keepdims); }
inline Tensor reduce_max(const Tensor& x, std::optional<std::int64_t> axis = std::nullopt, bool keepdims = false, const Backend* f = nullptr) { return get_framework(f, x).reduce_max(x, axis, keepdims); }

inline Tensor gather_nd(const Tensor& params, const Tensor& indices, const Backend* f = nullptr) { return get_framework(f, params, indices).gather_nd(params, indices); }
inline Tensor scatter_nd(const Tensor& indices, const Tensor& updates, const Shape& out_shape, std::string_view reduction = "sum", const Backend* f = nullptr) { return get_framework(f, indices, updates).scatter_nd(indices, updates, out_shape, reduction); }

inline Tensor matmul(const Tensor& a, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, a, b).matmul(a, b); }
inline Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b, const Backend* f = nullptr) { return get_framework(f, x, w, b).linear(x, w, b); }
inline Tensor inv(const Tensor& a, const Backend* f = nullptr) { return get_framework(f, a).inv(a); }
inline SvdTensors svd(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).svd(x); }

inline HostValue to_host(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).to_host(x); }

inline Variable variable(const Tensor& x, const Backend* f = nullptr) { return get_framework(f, x).variable(x); }
inline GradientResult execute_with_gradients(const LossFn& fn, std::span<const Variable> vars, const Backend* f = nullptr) { return get_framework(f, vars.empty() ? Tensor() : vars.front().value).execute_with_gradients(fn, vars); }
inline std::vector<Variable> gradient_descent_update(std::span<const Variable> vars, std::span<const Tensor> grads, double lr, const Backend* f = nullptr) { return get_framework(f, grads).gradient_descent_update(vars, grads, lr); }

// Scalar of x's dtype on x's backend, for the mixed Tensor/double operators.
inline Tensor scalar_like(const Tensor& x, double v) { return x.backend().full(Shape{}, v, x.dtype()); }

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator/(const Tensor& a, const Tensor& b) { return div(a, b); }
inline Tensor operator-(const Tensor& a) { return negative(a); }

inline Tensor operator+(const Tensor& a, double b) { return add(a, scalar_like(a, b)); }
inline Tensor operator-(const Tensor& a, double b) { return sub(a, scalar_like(a, b)); }
inline Tensor operator*(const Tensor& a, double b) { return mul(a, scalar_like(a, b)); }
inline Tensor operator/(const Tensor& a, double b) { return div(a, scalar_like(a, b)); }
inline Tensor operator+(double a, const Tensor& b) { return add(scalar_like(b, a), b); }
inline Tensor operator-(double a, const Tensor& b) { return sub(scalar_like(b, a), b); }
inline Tensor operator*(double a, const Tensor& b) { return mul(scalar_like(b, a), b); }
inline Tensor operator/(double a, const Tensor& b) { return div(scalar_like(b, a), b); }

}  // namespace templar
