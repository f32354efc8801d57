#pragma once

// Reference kernels over host Arrays. Every backend in the library shares
// these; they are deliberately plain scalar loops so they can double as the
// oracle for the other code paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "templar/core/array.hpp"
#include "templar/core/random.hpp"

namespace templar::kernels {

namespace detail {

inline void require_float(const Array& a, std::string_view op) {
  if (!is_floating(a.dtype())) {
    throw InvalidDType(std::string(op) + " requires a floating dtype, got " +
                       std::string(dtype_name(a.dtype())));
  }
}

inline void require_numeric(const Array& a, std::string_view op) {
  if (a.dtype() == DType::boolean) {
    throw InvalidDType(std::string(op) + " is not defined for bool tensors");
  }
}

inline void require_same_dtype(const Array& a, const Array& b, std::string_view op) {
  if (a.dtype() != b.dtype()) {
    throw InvalidDType(std::string(op) + ": mixed dtypes " + std::string(dtype_name(a.dtype())) +
                       " and " + std::string(dtype_name(b.dtype())) + " (cast explicitly)");
  }
}

template <class Fn>
decltype(auto) visit_float(DType dt, Fn&& fn) {
  if (dt == DType::float32) return fn(std::integral_constant<DType, DType::float32>{});
  return fn(std::integral_constant<DType, DType::float64>{});
}

template <class Fn>
decltype(auto) visit_numeric(DType dt, Fn&& fn) {
  switch (dt) {
    case DType::float32: return fn(std::integral_constant<DType, DType::float32>{});
    case DType::float64: return fn(std::integral_constant<DType, DType::float64>{});
    case DType::int32: return fn(std::integral_constant<DType, DType::int32>{});
    default: return fn(std::integral_constant<DType, DType::int64>{});
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// creation

inline Array full(const Shape& shape, DType dtype, double value) {
  Array out(shape, dtype);
  if (value != 0.0) {
    for (std::int64_t i = 0; i < out.numel(); ++i) out.set_from_double(i, value);
  }
  return out;
}

inline Array from_doubles(const Shape& shape, std::span<const double> values, DType dtype) {
  if (static_cast<std::int64_t>(values.size()) != shape.numel()) {
    throw InvalidArgument(std::to_string(values.size()) + " values do not fill shape " + shape.str());
  }
  Array out(shape, dtype);
  for (std::size_t i = 0; i < values.size(); ++i) out.set_from_double(static_cast<std::int64_t>(i), values[i]);
  return out;
}

// num points from start to stop inclusive, interpolated element-wise; the new
// axis of length num is leading.
inline Array linspace(const Array& start, const Array& stop, std::int64_t num) {
  if (num < 2) throw InvalidArgument("linspace requires num >= 2, got " + std::to_string(num));
  detail::require_float(start, "linspace");
  detail::require_same_dtype(start, stop, "linspace");
  const Shape inner = broadcast_shapes(start.shape(), stop.shape());
  std::vector<std::int64_t> ext{num};
  ext.insert(ext.end(), inner.begin(), inner.end());
  Array out(Shape(std::move(ext)), start.dtype());
  const auto ss = broadcast_strides(start.shape(), inner);
  const auto ts = broadcast_strides(stop.shape(), inner);
  const std::int64_t m = inner.numel();
  std::vector<std::int64_t> idx(inner.rank(), 0);
  for (std::int64_t j = 0; j < m; ++j) {
    std::int64_t so = 0, to = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      so += idx[d] * ss[d];
      to += idx[d] * ts[d];
    }
    const double a = start.get_double(so);
    const double b = stop.get_double(to);
    for (std::int64_t i = 0; i < num; ++i) {
      const double v = i == num - 1 ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(num - 1);
      out.set_from_double(i * m + j, v);
    }
    next_index(idx, inner);
  }
  return out;
}

inline Array random_uniform(double low, double high, const Shape& shape, std::uint64_t seed, DType dtype) {
  if (!(low < high)) throw InvalidArgument("random_uniform requires low < high");
  if (!is_floating(dtype)) throw InvalidDType("random_uniform produces floating tensors only");
  Array out(shape, dtype);
  detail::visit_float(dtype, [&](auto d) {
    using T = element_t<decltype(d)::value>;
    auto v = out.mutable_values<decltype(d)::value>();
    const T lo = static_cast<T>(low), hi = static_cast<T>(high);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double u = random::unit_double(seed, i);
      T x = static_cast<T>(low + (high - low) * u);
      // Rounding may land on the excluded upper bound.
      if (x >= hi) x = std::nextafter(hi, lo);
      if (x < lo) x = lo;
      v[i] = x;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// dtype

// Value-preserving conversion; float to int truncates toward zero.
inline Array cast(const Array& a, DType to) {
  if (a.dtype() == to) return a;
  Array out(a.shape(), to);
  visit_dtype(a.dtype(), [&](auto from) {
    auto src = a.values<decltype(from)::value>();
    visit_dtype(to, [&](auto dst_tag) {
      using D = element_t<decltype(dst_tag)::value>;
      auto dst = out.mutable_values<decltype(dst_tag)::value>();
      for (std::size_t i = 0; i < src.size(); ++i) {
        if constexpr (std::is_same_v<D, std::uint8_t>) {
          dst[i] = src[i] != 0;
        } else if constexpr (std::is_integral_v<D>) {
          dst[i] = static_cast<D>(std::trunc(static_cast<double>(src[i])));
        } else {
          dst[i] = static_cast<D>(src[i]);
        }
      }
    });
  });
  return out;
}

inline Array to_f64(const Array& a) { return cast(a, DType::float64); }

// ---------------------------------------------------------------------------
// layout

inline Array transpose(const Array& a, std::span<const std::size_t> perm) {
  const Shape& in = a.shape();
  std::vector<std::int64_t> ext(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) ext[i] = in[perm[i]];
  Shape out_shape(std::move(ext));
  Array out(out_shape, a.dtype());
  const auto in_strides = in.strides();
  std::vector<std::int64_t> gather(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) gather[i] = in_strides[perm[i]];
  visit_dtype(a.dtype(), [&](auto d) {
    auto src = a.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    std::vector<std::int64_t> idx(perm.size(), 0);
    for (std::size_t o = 0; o < dst.size(); ++o) {
      std::int64_t off = 0;
      for (std::size_t k = 0; k < idx.size(); ++k) off += idx[k] * gather[k];
      dst[o] = src[static_cast<std::size_t>(off)];
      next_index(idx, out_shape);
    }
  });
  return out;
}

inline Array concatenate(std::span<const Array> parts, std::size_t axis) {
  if (parts.empty()) throw InvalidArgument("concatenate needs at least one tensor");
  const Array& first = parts.front();
  std::vector<std::int64_t> ext = first.shape().extents();
  ext[axis] = 0;
  for (const Array& p : parts) {
    detail::require_same_dtype(first, p, "concatenate");
    if (p.rank() != first.rank()) throw InvalidArgument("concatenate: rank mismatch");
    for (std::size_t d = 0; d < p.rank(); ++d) {
      if (d != axis && p.shape()[d] != first.shape()[d]) {
        throw InvalidArgument("concatenate: ragged shapes " + first.shape().str() + " and " + p.shape().str());
      }
    }
    ext[axis] += p.shape()[axis];
  }
  Shape out_shape(ext);
  Array out(out_shape, first.dtype());
  std::int64_t outer = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= ext[d];
  std::int64_t inner = 1;
  for (std::size_t d = axis + 1; d < ext.size(); ++d) inner *= ext[d];
  visit_dtype(first.dtype(), [&](auto d) {
    auto dst = out.mutable_values<decltype(d)::value>();
    std::size_t pos = 0;
    for (std::int64_t o = 0; o < outer; ++o) {
      for (const Array& p : parts) {
        auto src = p.values<decltype(d)::value>();
        const auto chunk = static_cast<std::size_t>(p.shape()[axis] * inner);
        std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(o * static_cast<std::int64_t>(chunk)), chunk,
                    dst.begin() + static_cast<std::ptrdiff_t>(pos));
        pos += chunk;
      }
    }
  });
  return out;
}

// Elements [start, stop) along axis.
inline Array slice(const Array& a, std::size_t axis, std::int64_t start, std::int64_t stop) {
  std::vector<std::int64_t> ext = a.shape().extents();
  const std::int64_t len = ext[axis];
  if (start < 0 || stop > len || start > stop) {
    throw IndexError("slice [" + std::to_string(start) + ", " + std::to_string(stop) + ") out of range for extent " +
                     std::to_string(len));
  }
  ext[axis] = stop - start;
  Shape out_shape(ext);
  Array out(out_shape, a.dtype());
  std::int64_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= ext[d];
  for (std::size_t d = axis + 1; d < ext.size(); ++d) inner *= ext[d];
  visit_dtype(a.dtype(), [&](auto d) {
    auto src = a.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    const auto chunk = static_cast<std::size_t>((stop - start) * inner);
    for (std::int64_t o = 0; o < outer; ++o) {
      std::copy_n(src.begin() + static_cast<std::ptrdiff_t>((o * len + start) * inner), chunk,
                  dst.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(o) * chunk));
    }
  });
  return out;
}

// numpy.tile semantics: the shorter of (shape, reps) is left-padded with ones.
inline Array tile(const Array& a, std::span<const std::int64_t> reps) {
  const std::size_t rank = std::max(a.rank(), reps.size());
  std::vector<std::int64_t> in_ext(rank, 1), rep(rank, 1), out_ext(rank);
  for (std::size_t i = 0; i < a.rank(); ++i) in_ext[rank - a.rank() + i] = a.shape()[i];
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (reps[i] < 0) throw InvalidArgument("tile repetitions must be non-negative");
    rep[rank - reps.size() + i] = reps[i];
  }
  for (std::size_t i = 0; i < rank; ++i) out_ext[i] = in_ext[i] * rep[i];
  Shape in_shape(in_ext), out_shape(out_ext);
  Array out(out_shape, a.dtype());
  const auto in_strides = in_shape.strides();
  visit_dtype(a.dtype(), [&](auto d) {
    auto src = a.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    std::vector<std::int64_t> idx(rank, 0);
    for (std::size_t o = 0; o < dst.size(); ++o) {
      std::int64_t off = 0;
      for (std::size_t k = 0; k < rank; ++k) off += (idx[k] % in_ext[k]) * in_strides[k];
      dst[o] = src[static_cast<std::size_t>(off)];
      next_index(idx, out_shape);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// elementwise

template <class Fn>
Array map_float(const Array& a, std::string_view op, Fn fn) {
  detail::require_float(a, op);
  Array out(a.shape(), a.dtype());
  detail::visit_float(a.dtype(), [&](auto d) {
    auto src = a.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
  });
  return out;
}

template <class Fn>
Array map_numeric(const Array& a, std::string_view op, Fn fn) {
  detail::require_numeric(a, op);
  Array out(a.shape(), a.dtype());
  detail::visit_numeric(a.dtype(), [&](auto d) {
    auto src = a.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = fn(src[i]);
  });
  return out;
}

// Broadcasting binary map. `out_shape` must be broadcast_shapes(a, b).
template <class Fn>
Array zip(const Array& a, const Array& b, const Shape& out_shape, DType out_dtype, Fn fn) {
  Array out(out_shape, out_dtype);
  detail::visit_numeric(a.dtype(), [&](auto d) {
    auto x = a.values<decltype(d)::value>();
    auto y = b.values<decltype(d)::value>();
    detail::visit_numeric(out_dtype, [&](auto od) {
      auto dst = out.mutable_values<decltype(od)::value>();
      using O = element_t<decltype(od)::value>;
      if (a.shape() == out_shape && b.shape() == out_shape) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<O>(fn(x[i], y[i]));
        return;
      }
      if (b.numel() == 1 && a.shape() == out_shape) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<O>(fn(x[i], y[0]));
        return;
      }
      const auto sa = broadcast_strides(a.shape(), out_shape);
      const auto sb = broadcast_strides(b.shape(), out_shape);
      std::vector<std::int64_t> idx(out_shape.rank(), 0);
      for (std::size_t o = 0; o < dst.size(); ++o) {
        std::int64_t oa = 0, ob = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          oa += idx[k] * sa[k];
          ob += idx[k] * sb[k];
        }
        dst[o] = static_cast<O>(fn(x[static_cast<std::size_t>(oa)], y[static_cast<std::size_t>(ob)]));
        next_index(idx, out_shape);
      }
    });
  });
  return out;
}

enum class BinaryOp { add, sub, mul, div, pow, maximum, minimum };

inline std::string_view binary_name(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "add";
    case BinaryOp::sub: return "sub";
    case BinaryOp::mul: return "mul";
    case BinaryOp::div: return "div";
    case BinaryOp::pow: return "pow";
    case BinaryOp::maximum: return "maximum";
    case BinaryOp::minimum: return "minimum";
  }
  return "?";
}

inline Array binary(BinaryOp op, const Array& a, const Array& b, const Shape& out_shape) {
  const auto name = binary_name(op);
  detail::require_same_dtype(a, b, name);
  detail::require_numeric(a, name);
  if ((op == BinaryOp::pow) && !is_floating(a.dtype())) detail::require_float(a, name);
  const DType dt = a.dtype();
  switch (op) {
    case BinaryOp::add: return zip(a, b, out_shape, dt, [](auto x, auto y) { return x + y; });
    case BinaryOp::sub: return zip(a, b, out_shape, dt, [](auto x, auto y) { return x - y; });
    case BinaryOp::mul: return zip(a, b, out_shape, dt, [](auto x, auto y) { return x * y; });
    case BinaryOp::div:
      return zip(a, b, out_shape, dt, [](auto x, auto y) {
        if constexpr (std::is_integral_v<decltype(x)>) {
          if (y == 0) throw NumericError("integer division by zero");
        }
        return x / y;
      });
    case BinaryOp::pow: return zip(a, b, out_shape, dt, [](auto x, auto y) { return std::pow(x, y); });
    case BinaryOp::maximum: return zip(a, b, out_shape, dt, [](auto x, auto y) { return x < y ? y : x; });
    case BinaryOp::minimum: return zip(a, b, out_shape, dt, [](auto x, auto y) { return y < x ? y : x; });
  }
  throw InvalidArgument("unknown binary op");
}

inline Array clip(const Array& a, double lo, double hi) {
  if (lo > hi) throw InvalidArgument("clip requires x_min <= x_max");
  return map_numeric(a, "clip", [lo, hi](auto x) {
    using T = decltype(x);
    const T l = static_cast<T>(lo), h = static_cast<T>(hi);
    return x < l ? l : (h < x ? h : x);
  });
}

// ---------------------------------------------------------------------------
// reductions

enum class Reduction { sum, mean, min, max };

// Input positions reduced together share an output position; `axes` flags
// which input axes are reduced.
struct ReducePlan {
  Shape out_shape;       // with keepdims applied
  Shape kept_shape;      // reduced axes set to extent 1
  std::vector<bool> reduced;
  std::int64_t group_size = 1;
};

inline ReducePlan plan_reduce(const Shape& in, std::span<const std::size_t> axes, bool keepdims) {
  ReducePlan plan;
  plan.reduced.assign(in.rank(), false);
  for (auto ax : axes) plan.reduced[ax] = true;
  std::vector<std::int64_t> out, kept;
  for (std::size_t d = 0; d < in.rank(); ++d) {
    if (plan.reduced[d]) {
      plan.group_size *= in[d];
      kept.push_back(1);
      if (keepdims) out.push_back(1);
    } else {
      kept.push_back(in[d]);
      out.push_back(in[d]);
    }
  }
  plan.out_shape = Shape(std::move(out));
  plan.kept_shape = Shape(std::move(kept));
  return plan;
}

// Flat output position for every input position, in row-major input order.
inline std::vector<std::int64_t> reduce_targets(const Shape& in, const ReducePlan& plan) {
  std::vector<std::int64_t> targets(static_cast<std::size_t>(in.numel()));
  const auto ks = plan.kept_shape.strides();
  std::vector<std::int64_t> idx(in.rank(), 0);
  for (auto& t : targets) {
    std::int64_t off = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) {
      if (!plan.reduced[d]) off += idx[d] * ks[d];
    }
    t = off;
    next_index(idx, in);
  }
  return targets;
}

// Accumulates in double, then casts back to the input dtype.
inline Array reduce(const Array& a, Reduction kind, const ReducePlan& plan) {
  detail::require_numeric(a, "reduce");
  if (kind == Reduction::mean) detail::require_float(a, "reduce_mean");
  const auto n_out = static_cast<std::size_t>(plan.out_shape.numel());
  if ((kind == Reduction::min || kind == Reduction::max) && plan.group_size == 0 && !is_floating(a.dtype())) {
    throw InvalidArgument("min/max reduction over an empty integer axis");
  }
  double init = 0.0;
  if (kind == Reduction::min) init = std::numeric_limits<double>::infinity();
  if (kind == Reduction::max) init = -std::numeric_limits<double>::infinity();
  std::vector<double> acc(n_out, init);
  const auto targets = reduce_targets(a.shape(), plan);
  const auto vals = a.to_doubles();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    double& s = acc[static_cast<std::size_t>(targets[i])];
    switch (kind) {
      case Reduction::sum:
      case Reduction::mean: s += vals[i]; break;
      case Reduction::min: if (vals[i] < s || std::isnan(vals[i])) s = vals[i]; break;
      case Reduction::max: if (vals[i] > s || std::isnan(vals[i])) s = vals[i]; break;
    }
  }
  if (kind == Reduction::mean) {
    for (auto& s : acc) s /= static_cast<double>(plan.group_size);
  }
  return from_doubles(plan.out_shape, acc, a.dtype());
}

// Flat input index of the first extremum in every reduced group.
inline std::vector<std::int64_t> reduce_arg(const Array& a, Reduction kind, const ReducePlan& plan) {
  const auto n_out = static_cast<std::size_t>(plan.out_shape.numel());
  std::vector<std::int64_t> arg(n_out, -1);
  std::vector<double> best(n_out);
  const auto targets = reduce_targets(a.shape(), plan);
  const auto vals = a.to_doubles();
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const auto t = static_cast<std::size_t>(targets[i]);
    const bool better = kind == Reduction::min ? vals[i] < best[t] : vals[i] > best[t];
    if (arg[t] < 0 || better) {
      arg[t] = static_cast<std::int64_t>(i);
      best[t] = vals[i];
    }
  }
  return arg;
}

// Sum `g` down to `target` (inverse of broadcasting), in float64.
inline Array unbroadcast(const Array& g, const Shape& target) {
  if (g.shape() == target) return to_f64(g);
  const std::size_t lead = g.rank() - target.rank();
  std::vector<std::size_t> axes;
  for (std::size_t d = 0; d < g.rank(); ++d) {
    if (d < lead || (target[d - lead] == 1 && g.shape()[d] != 1)) axes.push_back(d);
  }
  auto plan = plan_reduce(g.shape(), axes, true);
  Array r = reduce(to_f64(g), Reduction::sum, plan);
  return r.reshaped(target);
}

// Broadcast `a` to `shape`.
inline Array broadcast_to(const Array& a, const Shape& shape) {
  if (a.shape() == shape) return a;
  return zip(a, Array(Shape{}, a.dtype()), shape, a.dtype(), [](auto x, auto) { return x; });
}

// ---------------------------------------------------------------------------
// indexing

namespace detail {

inline std::vector<std::int64_t> index_values(const Array& indices) {
  if (!is_integral(indices.dtype())) {
    throw InvalidDType("indices must be int32 or int64, got " + std::string(dtype_name(indices.dtype())));
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(indices.numel()));
  visit_dtype(indices.dtype(), [&](auto d) {
    if constexpr (is_integral(decltype(d)::value)) {
      auto v = indices.values<decltype(d)::value>();
      std::copy(v.begin(), v.end(), out.begin());
    }
  });
  return out;
}

// Interpretation of an index tensor [..., K]: number of tuples and K. An
// empty rank-1 index list is zero single-axis tuples.
inline std::pair<std::int64_t, std::int64_t> index_layout(const Shape& idx) {
  if (idx.rank() == 0) throw InvalidArgument("index tensor must have rank >= 1");
  if (idx.rank() == 1 && idx[0] == 0) return {0, 1};
  const std::int64_t k = idx[idx.rank() - 1];
  return {k == 0 ? 0 : idx.numel() / k, k};
}

inline std::vector<std::int64_t> index_prefix(const Shape& idx) {
  if (idx.rank() == 1 && idx[0] == 0) return {0};
  return {idx.begin(), idx.end() - 1};
}

// Flat offsets of the slices addressed by each index tuple.
inline std::vector<std::int64_t> tuple_offsets(std::span<const std::int64_t> flat, std::int64_t tuples, std::int64_t k,
                                               const Shape& target) {
  if (k > static_cast<std::int64_t>(target.rank())) {
    throw InvalidArgument("index depth " + std::to_string(k) + " exceeds rank " + std::to_string(target.rank()));
  }
  const auto strides = target.strides();
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(tuples));
  for (std::int64_t t = 0; t < tuples; ++t) {
    std::int64_t off = 0;
    for (std::int64_t j = 0; j < k; ++j) {
      std::int64_t i = flat[static_cast<std::size_t>(t * k + j)];
      const std::int64_t ext = target[static_cast<std::size_t>(j)];
      if (i < 0 || i >= ext) {
        throw IndexError("index " + std::to_string(i) + " out of bounds for axis " + std::to_string(j) +
                         " with extent " + std::to_string(ext));
      }
      off += i * strides[static_cast<std::size_t>(j)];
    }
    offsets[static_cast<std::size_t>(t)] = off;
  }
  return offsets;
}

}  // namespace detail

inline Array gather_nd(const Array& params, const Array& indices) {
  const auto flat = detail::index_values(indices);
  const auto [tuples, k] = detail::index_layout(indices.shape());
  const auto offsets = detail::tuple_offsets(flat, tuples, k, params.shape());
  std::vector<std::int64_t> ext = detail::index_prefix(indices.shape());
  std::int64_t slice_size = 1;
  for (std::size_t d = static_cast<std::size_t>(k); d < params.rank(); ++d) {
    ext.push_back(params.shape()[d]);
    slice_size *= params.shape()[d];
  }
  Array out(Shape(std::move(ext)), params.dtype());
  visit_dtype(params.dtype(), [&](auto d) {
    auto src = params.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    for (std::size_t t = 0; t < offsets.size(); ++t) {
      std::copy_n(src.begin() + offsets[t], slice_size, dst.begin() + static_cast<std::ptrdiff_t>(t) * slice_size);
    }
  });
  return out;
}

// Zero-initialised output; duplicate indices accumulate by sum.
inline Array scatter_nd(const Array& indices, const Array& updates, const Shape& out_shape) {
  detail::require_numeric(updates, "scatter_nd");
  const auto flat = detail::index_values(indices);
  const auto [tuples, k] = detail::index_layout(indices.shape());
  const auto offsets = detail::tuple_offsets(flat, tuples, k, out_shape);
  std::vector<std::int64_t> expect = detail::index_prefix(indices.shape());
  std::int64_t slice_size = 1;
  for (std::size_t d = static_cast<std::size_t>(k); d < out_shape.rank(); ++d) {
    expect.push_back(out_shape[d]);
    slice_size *= out_shape[d];
  }
  if (Shape(expect) != updates.shape()) {
    throw InvalidArgument("scatter_nd: updates shape " + updates.shape().str() + " should be " + Shape(expect).str());
  }
  Array out(out_shape, updates.dtype());
  detail::visit_numeric(updates.dtype(), [&](auto d) {
    auto src = updates.values<decltype(d)::value>();
    auto dst = out.mutable_values<decltype(d)::value>();
    for (std::size_t t = 0; t < offsets.size(); ++t) {
      for (std::int64_t j = 0; j < slice_size; ++j) {
        dst[static_cast<std::size_t>(offsets[t] + j)] += src[t * static_cast<std::size_t>(slice_size) + j];
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// linear algebra (trailing two dims, batched over broadcast leading dims)

struct MatmulPlan {
  Shape out_shape;
  Shape batch;
  std::int64_t m = 0, k = 0, n = 0;
};

inline MatmulPlan plan_matmul(const Shape& a, const Shape& b) {
  if (a.rank() < 2 || b.rank() < 2) throw InvalidArgument("matmul operands need rank >= 2");
  MatmulPlan p;
  p.m = a[a.rank() - 2];
  p.k = a[a.rank() - 1];
  p.n = b[b.rank() - 1];
  if (b[b.rank() - 2] != p.k) {
    throw InvalidArgument("matmul inner dimensions differ: " + a.str() + " x " + b.str());
  }
  Shape ba(std::vector<std::int64_t>(a.begin(), a.end() - 2));
  Shape bb(std::vector<std::int64_t>(b.begin(), b.end() - 2));
  p.batch = broadcast_shapes(ba, bb);
  std::vector<std::int64_t> ext = p.batch.extents();
  ext.push_back(p.m);
  ext.push_back(p.n);
  p.out_shape = Shape(std::move(ext));
  return p;
}

// Per-batch element offsets (in matrices) of an operand broadcast to `batch`.
inline std::vector<std::int64_t> batch_offsets(const Shape& operand, const Shape& batch) {
  Shape ob(std::vector<std::int64_t>(operand.begin(), operand.end() - 2));
  const auto s = broadcast_strides(ob, batch);
  std::vector<std::int64_t> out(static_cast<std::size_t>(batch.numel()));
  std::vector<std::int64_t> idx(batch.rank(), 0);
  for (auto& o : out) {
    std::int64_t off = 0;
    for (std::size_t d = 0; d < idx.size(); ++d) off += idx[d] * s[d];
    o = off;
    next_index(idx, batch);
  }
  return out;
}

inline Array matmul(const Array& a, const Array& b) {
  detail::require_same_dtype(a, b, "matmul");
  detail::require_numeric(a, "matmul");
  const auto p = plan_matmul(a.shape(), b.shape());
  Array out(p.out_shape, a.dtype());
  const auto oa = batch_offsets(a.shape(), p.batch);
  const auto ob = batch_offsets(b.shape(), p.batch);
  detail::visit_numeric(a.dtype(), [&](auto d) {
    using T = element_t<decltype(d)::value>;
    using Acc = std::conditional_t<std::is_floating_point_v<T>, double, T>;
    auto x = a.values<decltype(d)::value>();
    auto y = b.values<decltype(d)::value>();
    auto z = out.mutable_values<decltype(d)::value>();
    for (std::size_t bi = 0; bi < oa.size(); ++bi) {
      const T* A = x.data() + oa[bi] * p.m * p.k;
      const T* B = y.data() + ob[bi] * p.k * p.n;
      T* C = z.data() + static_cast<std::int64_t>(bi) * p.m * p.n;
      for (std::int64_t i = 0; i < p.m; ++i) {
        for (std::int64_t j = 0; j < p.n; ++j) {
          Acc s{};
          for (std::int64_t q = 0; q < p.k; ++q) s += static_cast<Acc>(A[i * p.k + q]) * static_cast<Acc>(B[q * p.n + j]);
          C[i * p.n + j] = static_cast<T>(s);
        }
      }
    }
  });
  return out;
}

// Swap the trailing two axes.
inline Array swap_last(const Array& a) {
  std::vector<std::size_t> perm(a.rank());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::swap(perm[a.rank() - 1], perm[a.rank() - 2]);
  return transpose(a, perm);
}

// Batched Gauss-Jordan inverse with partial pivoting, computed in double.
inline Array inv(const Array& a) {
  detail::require_float(a, "inv");
  if (a.rank() < 2 || a.shape()[a.rank() - 1] != a.shape()[a.rank() - 2]) {
    throw InvalidArgument("inv requires square trailing matrices, got " + a.shape().str());
  }
  const std::int64_t n = a.shape()[a.rank() - 1];
  const std::int64_t batches = n == 0 ? 0 : a.numel() / (n * n);
  auto vals = a.to_doubles();
  std::vector<double> out(vals.size());
  std::vector<double> w(static_cast<std::size_t>(n * 2 * n));
  for (std::int64_t bi = 0; bi < batches; ++bi) {
    const double* M = vals.data() + bi * n * n;
    double scale = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        w[static_cast<std::size_t>(i * 2 * n + j)] = M[i * n + j];
        w[static_cast<std::size_t>(i * 2 * n + n + j)] = i == j ? 1.0 : 0.0;
        scale = std::max(scale, std::abs(M[i * n + j]));
      }
    }
    const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;
    for (std::int64_t c = 0; c < n; ++c) {
      std::int64_t piv = c;
      for (std::int64_t r = c + 1; r < n; ++r) {
        if (std::abs(w[static_cast<std::size_t>(r * 2 * n + c)]) > std::abs(w[static_cast<std::size_t>(piv * 2 * n + c)])) piv = r;
      }
      const double pv = w[static_cast<std::size_t>(piv * 2 * n + c)];
      if (!(std::abs(pv) > tol)) throw NumericError("matrix is singular");
      if (piv != c) {
        for (std::int64_t j = 0; j < 2 * n; ++j) std::swap(w[static_cast<std::size_t>(piv * 2 * n + j)], w[static_cast<std::size_t>(c * 2 * n + j)]);
      }
      for (std::int64_t j = 0; j < 2 * n; ++j) w[static_cast<std::size_t>(c * 2 * n + j)] /= pv;
      for (std::int64_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = w[static_cast<std::size_t>(r * 2 * n + c)];
        if (f == 0.0) continue;
        for (std::int64_t j = 0; j < 2 * n; ++j) w[static_cast<std::size_t>(r * 2 * n + j)] -= f * w[static_cast<std::size_t>(c * 2 * n + j)];
      }
    }
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = 0; j < n; ++j) out[static_cast<std::size_t>(bi * n * n + i * n + j)] = w[static_cast<std::size_t>(i * 2 * n + n + j)];
    }
  }
  return from_doubles(a.shape(), out, a.dtype());
}

struct SvdResult {
  Array u;  // [..., m, k]
  Array d;  // [..., k], descending
  Array v;  // [..., n, k]; not transposed
};

// One-sided Jacobi SVD on the trailing matrices, in double.
inline SvdResult svd(const Array& a) {
  detail::require_float(a, "svd");
  if (a.rank() < 2) throw InvalidArgument("svd requires rank >= 2");
  const std::int64_t rows = a.shape()[a.rank() - 2], cols = a.shape()[a.rank() - 1];
  const bool wide = rows < cols;
  const std::int64_t m = wide ? cols : rows, n = wide ? rows : cols;  // m >= n
  const std::int64_t k = n;
  std::vector<std::int64_t> batch(a.shape().begin(), a.shape().end() - 2);
  const std::int64_t batches = Shape(batch).numel();
  const auto vals = a.to_doubles();

  std::vector<double> U_all, D_all, V_all;
  U_all.reserve(static_cast<std::size_t>(batches * rows * k));
  D_all.reserve(static_cast<std::size_t>(batches * k));
  V_all.reserve(static_cast<std::size_t>(batches * cols * k));

  for (std::int64_t bi = 0; bi < batches; ++bi) {
    const double* src = vals.data() + bi * rows * cols;
    // Work on column-major copies: A is m x n (transposed when wide).
    std::vector<double> A(static_cast<std::size_t>(m * n)), V(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t j = 0; j < n; ++j) A[static_cast<std::size_t>(j * m + i)] = wide ? src[j * cols + i] : src[i * cols + j];
    }
    for (std::int64_t j = 0; j < n; ++j) V[static_cast<std::size_t>(j * n + j)] = 1.0;
    for (int sweep = 0; sweep < 60; ++sweep) {
      double off = 0.0;
      for (std::int64_t p = 0; p < n - 1; ++p) {
        for (std::int64_t q = p + 1; q < n; ++q) {
          double alpha = 0, beta = 0, gamma = 0;
          for (std::int64_t i = 0; i < m; ++i) {
            const double ap = A[static_cast<std::size_t>(p * m + i)], aq = A[static_cast<std::size_t>(q * m + i)];
            alpha += ap * ap;
            beta += aq * aq;
            gamma += ap * aq;
          }
          if (gamma == 0.0) continue;
          off = std::max(off, std::abs(gamma) / std::sqrt(alpha * beta));
          const double zeta = (beta - alpha) / (2.0 * gamma);
          const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
          const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
          for (std::int64_t i = 0; i < m; ++i) {
            double& ap = A[static_cast<std::size_t>(p * m + i)];
            double& aq = A[static_cast<std::size_t>(q * m + i)];
            const double x = ap, y = aq;
            ap = c * x - s * y;
            aq = s * x + c * y;
          }
          for (std::int64_t i = 0; i < n; ++i) {
            double& vp = V[static_cast<std::size_t>(p * n + i)];
            double& vq = V[static_cast<std::size_t>(q * n + i)];
            const double x = vp, y = vq;
            vp = c * x - s * y;
            vq = s * x + c * y;
          }
        }
      }
      if (off < 1e-15) break;
    }
    std::vector<double> sv(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::int64_t i = 0; i < m; ++i) s += A[static_cast<std::size_t>(j * m + i)] * A[static_cast<std::size_t>(j * m + i)];
      sv[static_cast<std::size_t>(j)] = std::sqrt(s);
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return sv[static_cast<std::size_t>(x)] > sv[static_cast<std::size_t>(y)]; });
    // Left vectors: A column / sigma (m x k); right vectors: V columns (n x k).
    std::vector<double> left(static_cast<std::size_t>(m * k)), right(static_cast<std::size_t>(n * k));
    for (std::int64_t c = 0; c < k; ++c) {
      const auto j = order[static_cast<std::size_t>(c)];
      const double s = sv[static_cast<std::size_t>(j)];
      for (std::int64_t i = 0; i < m; ++i) left[static_cast<std::size_t>(i * k + c)] = s > 0 ? A[static_cast<std::size_t>(j * m + i)] / s : (i == c ? 1.0 : 0.0);
      for (std::int64_t i = 0; i < n; ++i) right[static_cast<std::size_t>(i * k + c)] = V[static_cast<std::size_t>(j * n + i)];
      D_all.push_back(s);
    }
    // For wide inputs the roles of the singular vectors swap.
    const auto& Ub = wide ? right : left;
    const auto& Vb = wide ? left : right;
    U_all.insert(U_all.end(), Ub.begin(), Ub.end());
    V_all.insert(V_all.end(), Vb.begin(), Vb.end());
  }
  auto with = [&](std::vector<std::int64_t> tail) {
    std::vector<std::int64_t> e = batch;
    e.insert(e.end(), tail.begin(), tail.end());
    return Shape(std::move(e));
  };
  return {from_doubles(with({rows, k}), U_all, a.dtype()), from_doubles(with({k}), D_all, a.dtype()),
          from_doubles(with({cols, k}), V_all, a.dtype())};
}

}  // namespace templar::kernels
