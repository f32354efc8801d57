#pragma once

// Shared implementation of the core op surface over host Arrays. Each method
// is an eager prologue (dtype lookup, axis normalization, shape construction)
// followed by graph-resident apply() calls carrying the forward kernel and
// its backward rule. The host and autodiff backends differ only in how
// apply() wraps results.

#include <cmath>
#include <initializer_list>
#include <numeric>
#include <string>

#include "templar/core/backend.hpp"
#include "templar/core/kernels.hpp"

namespace templar::backends {

namespace grad {

using kernels::BinaryOp;

inline Array f64(const Array& a) { return kernels::to_f64(a); }

inline Array binary(BinaryOp op, const Array& a, const Array& b) {
  const Array x = f64(a), y = f64(b);
  return kernels::binary(op, x, y, broadcast_shapes(x.shape(), y.shape()));
}
inline Array mul(const Array& a, const Array& b) { return binary(BinaryOp::mul, a, b); }
inline Array div(const Array& a, const Array& b) { return binary(BinaryOp::div, a, b); }

template <class Fn>
Array map(const Array& a, Fn fn) {
  return kernels::map_float(f64(a), "grad", fn);
}

// 1.0 where pred(a_i, b_i) holds on the broadcast grid, else 0.0.
template <class Pred>
Array mask(const Array& a, const Array& b, Pred pred) {
  const Shape s = broadcast_shapes(a.shape(), b.shape());
  return kernels::zip(a, b, s, DType::float64, [pred](auto x, auto y) { return pred(x, y) ? 1.0 : 0.0; });
}

// Sum of the tiles of g back onto the untiled shape.
inline Array untile(const Array& g, const Shape& in_shape) {
  const std::size_t rank = g.rank();
  std::vector<std::int64_t> in_ext(rank, 1);
  for (std::size_t i = 0; i < in_shape.rank(); ++i) in_ext[rank - in_shape.rank() + i] = in_shape[i];
  const Shape padded(in_ext);
  const auto strides = padded.strides();
  std::vector<double> acc(static_cast<std::size_t>(padded.numel()), 0.0);
  const auto gv = g.to_doubles();
  std::vector<std::int64_t> idx(rank, 0);
  for (double v : gv) {
    std::int64_t off = 0;
    for (std::size_t k = 0; k < rank; ++k) off += (idx[k] % in_ext[k]) * strides[k];
    acc[static_cast<std::size_t>(off)] += v;
    next_index(idx, g.shape());
  }
  return kernels::from_doubles(in_shape, acc, DType::float64);
}

// g placed into a zero array of in_shape at [start, start + extent) along axis.
inline Array unslice(const Array& g, const Shape& in_shape, std::size_t axis, std::int64_t start) {
  std::vector<Array> parts;
  const std::int64_t len = in_shape[axis];
  const std::int64_t stop = start + g.shape()[axis];
  auto zeros_with = [&](std::int64_t n) {
    std::vector<std::int64_t> e = in_shape.extents();
    e[axis] = n;
    return Array(Shape(e), DType::float64);
  };
  if (start > 0) parts.push_back(zeros_with(start));
  parts.push_back(f64(g));
  if (stop < len) parts.push_back(zeros_with(len - stop));
  return kernels::concatenate(parts, axis);
}

}  // namespace grad

class ArrayBackend : public Backend {
 public:
  std::vector<Tensor> apply(const OpDef& def, std::span<const Tensor> inputs) const override {
    GroupTimer* timer = templar::detail::active_timer;
    const auto start = timer ? templar::detail::Clock::now() : templar::detail::Clock::time_point{};
    std::vector<Array> in;
    in.reserve(inputs.size());
    for (const Tensor& t : inputs) in.push_back(t.array());
    std::vector<Tensor> outs = wrap(def, inputs, in, def.forward(in));
    if (timer) {
      timer->ns[static_cast<std::size_t>(def.group)] += templar::detail::elapsed_ns(start);
      ++timer->graph_ops;
    }
    if (auto* sink = templar::detail::active_capture) sink->on_apply(*this, def, inputs, outs);
    return outs;
  }

  // ---- creation ------------------------------------------------------------

  Tensor zeros(const Shape& shape, DType dtype) const override { return full(shape, 0.0, dtype); }
  Tensor ones(const Shape& shape, DType dtype) const override { return full(shape, 1.0, dtype); }

  Tensor full(const Shape& shape, double value, DType dtype) const override {
    return run({"full", CodeGroup::backend, [shape, value, dtype](auto) { return one(kernels::full(shape, dtype, value)); }, {}});
  }

  Tensor array(const HostValue& values, DType dtype) const override {
    Array a = eager([&] {
      const Shape s = values.shape();
      const auto flat = values.flatten();
      return kernels::from_doubles(s, flat, dtype);
    });
    return constant(std::move(a));
  }

  Tensor array(std::span<const double> values, const Shape& shape, DType dtype) const override {
    return constant(kernels::from_doubles(shape, values, dtype));
  }

  Tensor linspace(double start, double stop, std::int64_t num, DType dtype) const override {
    return run({"linspace", CodeGroup::backend,
                [=](auto) {
                  return one(kernels::linspace(Array::scalar(start, dtype), Array::scalar(stop, dtype), num));
                },
                {}});
  }

  Tensor linspace(const Tensor& start, const Tensor& stop, std::int64_t num) const override {
    OpDef def{"linspace", CodeGroup::backend,
              [num](std::span<const Array> in) { return one(kernels::linspace(in[0], in[1], num)); },
              [num](std::span<const Array> in, std::span<const Array>, const Array& g) {
                // out_i = a + (b - a) t_i
                std::vector<double> t(static_cast<std::size_t>(num));
                for (std::int64_t i = 0; i < num; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(num - 1);
                std::vector<std::int64_t> te{num};
                for (std::size_t d = 1; d < g.rank(); ++d) te.push_back(1);
                const Array tw = kernels::from_doubles(Shape(te), t, DType::float64);
                const Array one_minus = grad::map(tw, [](double v) { return 1.0 - v; });
                const Array gb_full = grad::mul(g, tw), ga_full = grad::mul(g, one_minus);
                return std::vector<Array>{kernels::unbroadcast(sum_leading(ga_full), in[0].shape()),
                                          kernels::unbroadcast(sum_leading(gb_full), in[1].shape())};
              }};
    return run(std::move(def), {start, stop});
  }

  Tensor random_uniform(double low, double high, const Shape& shape, std::uint64_t seed, DType dtype) const override {
    return run({"random_uniform", CodeGroup::backend,
                [=](auto) { return one(kernels::random_uniform(low, high, shape, seed, dtype)); }, {}});
  }

  // ---- dtype ---------------------------------------------------------------

  Tensor cast(const Tensor& x, std::string_view dtype_str) const override {
    const DType to = eager([&] { return parse_dtype(dtype_str); });
    return run({"cast", CodeGroup::backend, [to](std::span<const Array> in) { return one(kernels::cast(in[0], to)); },
                [](std::span<const Array>, std::span<const Array>, const Array& g) { return one(grad::f64(g)); }},
               {x});
  }

  // ---- shape family ----------------------------------------------------------

  Tensor reshape(const Tensor& x, const Axes& new_shape) const override {
    const Shape target = eager([&] { return resolve_shape(x.shape(), new_shape); });
    return reshape_to(x, target, "reshape");
  }

  Tensor transpose(const Tensor& x, const std::optional<Axes>& axes) const override {
    const auto perm = eager([&] {
      const std::size_t rank = x.rank();
      std::vector<std::size_t> p(rank);
      if (!axes) {
        for (std::size_t i = 0; i < rank; ++i) p[i] = rank - 1 - i;
        return p;
      }
      if (axes->size() != rank) throw InvalidArgument("transpose axes must be a permutation of 0..rank-1");
      std::vector<bool> seen(rank, false);
      for (std::size_t i = 0; i < rank; ++i) {
        p[i] = normalize_axis((*axes)[i], rank);
        if (seen[p[i]]) throw InvalidArgument("transpose axes must be a permutation of 0..rank-1");
        seen[p[i]] = true;
      }
      return p;
    });
    return permute(x, perm, CodeGroup::backend);
  }

  Tensor expand_dims(const Tensor& x, std::int64_t axis) const override {
    const Shape target = eager([&] {
      std::vector<std::int64_t> e = x.shape().extents();
      const std::size_t ax = normalize_axis(axis, e.size() + 1);
      e.insert(e.begin() + static_cast<std::ptrdiff_t>(ax), 1);
      return Shape(std::move(e));
    });
    return reshape_to(x, target, "expand_dims");
  }

  Tensor concatenate(std::span<const Tensor> xs, std::int64_t axis) const override {
    if (xs.empty()) throw InvalidArgument("concatenate needs at least one tensor");
    const auto [ax, sizes] = eager([&] {
      const std::size_t a = normalize_axis(axis, xs.front().rank());
      std::vector<std::int64_t> s;
      for (const Tensor& t : xs) {
        if (t.rank() != xs.front().rank()) throw InvalidArgument("concatenate: rank mismatch");
        s.push_back(t.shape()[a]);
      }
      return std::pair{a, s};
    });
    OpDef def{"concatenate", CodeGroup::backend,
              [ax = ax](std::span<const Array> in) { return one(kernels::concatenate(in, ax)); },
              [ax = ax, sizes = sizes](std::span<const Array>, std::span<const Array>, const Array& g) {
                std::vector<Array> out;
                std::int64_t off = 0;
                for (auto n : sizes) {
                  out.push_back(kernels::slice(grad::f64(g), ax, off, off + n));
                  off += n;
                }
                return out;
              }};
    return run_all(def, xs);
  }

  Tensor tile(const Tensor& x, const Axes& reps) const override {
    return run({"tile", CodeGroup::backend, [reps](std::span<const Array> in) { return one(kernels::tile(in[0], reps)); },
                [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  return one(grad::untile(g, in[0].shape()));
                }},
               {x});
  }

  Tensor slice(const Tensor& x, std::int64_t axis, std::int64_t start, std::int64_t stop) const override {
    const auto [ax, lo, hi] = eager([&] {
      const std::size_t a = normalize_axis(axis, x.rank());
      const std::int64_t len = x.shape()[a];
      return std::tuple{a, start < 0 ? start + len : start, stop < 0 ? stop + len : stop};
    });
    return run({"slice", CodeGroup::backend,
                [ax = ax, lo = lo, hi = hi](std::span<const Array> in) { return one(kernels::slice(in[0], ax, lo, hi)); },
                [ax = ax, lo = lo](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  return one(grad::unslice(g, in[0].shape(), ax, lo));
                }},
               {x});
  }

  // ---- elementwise -----------------------------------------------------------

  Tensor sin(const Tensor& x) const override {
    return unary(x, "sin", [](auto v) { return std::sin(v); },
                 [](const Array& in, const Array&, const Array& g) {
                   return grad::mul(g, grad::map(in, [](double v) { return std::cos(v); }));
                 });
  }

  Tensor cos(const Tensor& x) const override {
    return unary(x, "cos", [](auto v) { return std::cos(v); },
                 [](const Array& in, const Array&, const Array& g) {
                   return grad::mul(g, grad::map(in, [](double v) { return -std::sin(v); }));
                 });
  }

  Tensor tanh(const Tensor& x) const override {
    return unary(x, "tanh", [](auto v) { return std::tanh(v); },
                 [](const Array&, const Array& out, const Array& g) {
                   return grad::mul(g, grad::map(out, [](double y) { return 1.0 - y * y; }));
                 });
  }

  Tensor sqrt(const Tensor& x) const override {
    return unary(x, "sqrt", [](auto v) { return std::sqrt(v); },
                 [](const Array&, const Array& out, const Array& g) {
                   // Zero at the origin rather than inf.
                   return grad::mul(g, grad::map(out, [](double y) { return y > 0.0 ? 0.5 / y : 0.0; }));
                 });
  }

  Tensor round(const Tensor& x) const override {
    return unary(x, "round", [](auto v) { return std::round(v); }, zero_grad);
  }

  Tensor floor(const Tensor& x) const override {
    return unary(x, "floor", [](auto v) { return std::floor(v); }, zero_grad);
  }

  Tensor abs(const Tensor& x) const override {
    OpDef def{"abs", CodeGroup::backend,
              [](std::span<const Array> in) {
                return one(kernels::map_numeric(in[0], "abs", [](auto v) { return v < 0 ? -v : v; }));
              },
              [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                return one(grad::mul(g, grad::map(in[0], [](double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); })));
              }};
    return run(std::move(def), {x});
  }

  Tensor negative(const Tensor& x) const override {
    OpDef def{"negative", CodeGroup::backend,
              [](std::span<const Array> in) {
                return one(kernels::map_numeric(in[0], "negative", [](auto v) { return static_cast<decltype(v)>(-v); }));
              },
              [](std::span<const Array>, std::span<const Array>, const Array& g) {
                return one(grad::map(g, [](double v) { return -v; }));
              }};
    return run(std::move(def), {x});
  }

  Tensor add(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::add, a, b,
                  [](std::span<const Array>, std::span<const Array>, const Array& g) {
                    return std::pair{grad::f64(g), grad::f64(g)};
                  });
  }

  Tensor sub(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::sub, a, b,
                  [](std::span<const Array>, std::span<const Array>, const Array& g) {
                    return std::pair{grad::f64(g), grad::map(g, [](double v) { return -v; })};
                  });
  }

  Tensor mul(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::mul, a, b,
                  [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                    return std::pair{grad::mul(g, in[1]), grad::mul(g, in[0])};
                  });
  }

  Tensor div(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::div, a, b,
                  [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                    const Array ga = grad::div(g, in[1]);
                    const Array q = grad::div(in[0], grad::mul(in[1], in[1]));
                    return std::pair{ga, grad::mul(grad::map(g, [](double v) { return -v; }), q)};
                  });
  }

  Tensor pow(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::pow, a, b,
                  [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                    const Array x = grad::f64(in[0]), p = grad::f64(in[1]);
                    const Shape s = broadcast_shapes(x.shape(), p.shape());
                    // d/dx x^p = p x^(p-1); taken as 0 at x = 0 with p < 1 instead of inf.
                    const Array dx = kernels::zip(x, p, s, DType::float64, [](double xv, double pv) {
                      if (pv == 0.0) return 0.0;
                      if (xv == 0.0 && pv < 1.0) return 0.0;
                      return pv * std::pow(xv, pv - 1.0);
                    });
                    // d/dp x^p = x^p ln x; taken as 0 for x <= 0.
                    const Array dp = kernels::zip(x, p, s, DType::float64, [](double xv, double pv) {
                      return xv > 0.0 ? std::pow(xv, pv) * std::log(xv) : 0.0;
                    });
                    return std::pair{grad::mul(g, dx), grad::mul(g, dp)};
                  });
  }

  // Ties route the gradient to the first operand.
  Tensor maximum(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::maximum, a, b,
                  [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                    return std::pair{grad::mul(g, grad::mask(in[0], in[1], [](auto x, auto y) { return !(x < y); })),
                                     grad::mul(g, grad::mask(in[0], in[1], [](auto x, auto y) { return x < y; }))};
                  });
  }

  Tensor minimum(const Tensor& a, const Tensor& b) const override {
    return binary(kernels::BinaryOp::minimum, a, b,
                  [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                    return std::pair{grad::mul(g, grad::mask(in[0], in[1], [](auto x, auto y) { return !(y < x); })),
                                     grad::mul(g, grad::mask(in[0], in[1], [](auto x, auto y) { return y < x; }))};
                  });
  }

  // Gradient passes inside the closed interval.
  Tensor clip(const Tensor& x, double x_min, double x_max) const override {
    OpDef def{"clip", CodeGroup::backend,
              [x_min, x_max](std::span<const Array> in) { return one(kernels::clip(in[0], x_min, x_max)); },
              [x_min, x_max](std::span<const Array> in, std::span<const Array>, const Array& g) {
                return one(grad::mul(g, grad::map(in[0], [=](double v) { return v >= x_min && v <= x_max ? 1.0 : 0.0; })));
              }};
    return run(std::move(def), {x});
  }

  // ---- reductions ------------------------------------------------------------

  Tensor reduce_sum(const Tensor& x, std::optional<std::int64_t> axis, bool keepdims) const override {
    return reduce(x, kernels::Reduction::sum, "reduce_sum", axis, keepdims);
  }
  Tensor reduce_mean(const Tensor& x, std::optional<std::int64_t> axis, bool keepdims) const override {
    return reduce(x, kernels::Reduction::mean, "reduce_mean", axis, keepdims);
  }
  Tensor reduce_min(const Tensor& x, std::optional<std::int64_t> axis, bool keepdims) const override {
    return reduce(x, kernels::Reduction::min, "reduce_min", axis, keepdims);
  }
  Tensor reduce_max(const Tensor& x, std::optional<std::int64_t> axis, bool keepdims) const override {
    return reduce(x, kernels::Reduction::max, "reduce_max", axis, keepdims);
  }

  // ---- indexing ----------------------------------------------------------------

  Tensor gather_nd(const Tensor& params, const Tensor& indices) const override {
    return run({"gather_nd", CodeGroup::backend,
                [](std::span<const Array> in) { return one(kernels::gather_nd(in[0], in[1])); },
                [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  return std::vector<Array>{kernels::scatter_nd(in[1], grad::f64(g), in[0].shape()), Array()};
                }},
               {params, indices});
  }

  Tensor scatter_nd(const Tensor& indices, const Tensor& updates, const Shape& out_shape,
                    std::string_view reduction) const override {
    eager([&] {
      if (reduction != "sum") throw InvalidArgument("scatter_nd supports reduction 'sum' only");
    });
    return run({"scatter_nd", CodeGroup::backend,
                [out_shape](std::span<const Array> in) { return one(kernels::scatter_nd(in[0], in[1], out_shape)); },
                [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  return std::vector<Array>{Array(), kernels::gather_nd(grad::f64(g), in[0])};
                }},
               {indices, updates});
  }

  // ---- linear algebra ----------------------------------------------------------

  Tensor matmul(const Tensor& a, const Tensor& b) const override {
    return run({"matmul", CodeGroup::backend,
                [](std::span<const Array> in) { return one(kernels::matmul(in[0], in[1])); },
                [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  const Array gf = grad::f64(g);
                  const Array ga = kernels::matmul(gf, kernels::swap_last(grad::f64(in[1])));
                  const Array gb = kernels::matmul(kernels::swap_last(grad::f64(in[0])), gf);
                  return std::vector<Array>{kernels::unbroadcast(ga, in[0].shape()),
                                            kernels::unbroadcast(gb, in[1].shape())};
                }},
               {a, b});
  }

  // x [..., in] . w(out, in)^T + b(out). Flattening x and transposing w are
  // graph-resident fix-ups around a single matmul.
  Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) const override {
    const auto [flat, out_shape] = eager([&] {
      if (w.rank() != 2 || x.rank() < 1 || x.shape()[x.rank() - 1] != w.shape()[1]) {
        throw InvalidArgument("linear: x " + x.shape().str() + " incompatible with w " + w.shape().str());
      }
      const std::int64_t in = w.shape()[1];
      std::vector<std::int64_t> o(x.shape().begin(), x.shape().end() - 1);
      o.push_back(w.shape()[0]);
      return std::pair{Shape{in == 0 ? 0 : x.numel() / in, in}, Shape(o)};
    });
    const Tensor x2 = reshape_to(x, flat, "reshape", CodeGroup::compilable);
    const Tensor wt = permute(w, {1, 0}, CodeGroup::compilable);
    const Tensor y = add(matmul(x2, wt), b);
    return reshape_to(y, out_shape, "reshape", CodeGroup::compilable);
  }

  Tensor inv(const Tensor& a) const override {
    return run({"inv", CodeGroup::backend, [](std::span<const Array> in) { return one(kernels::inv(in[0])); }, {}}, {a});
  }

  // The transpose of V is an extra graph-resident op.
  SvdTensors svd(const Tensor& x) const override {
    const Tensor in[] = {x};
    auto r = apply({"svd", CodeGroup::backend,
                    [](std::span<const Array> a) {
                      auto s = kernels::svd(a[0]);
                      return std::vector<Array>{s.u, s.d, s.v};
                    },
                    {}},
                   in);
    std::vector<std::size_t> perm(x.rank());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::swap(perm[perm.size() - 1], perm[perm.size() - 2]);
    return {r[0], r[1], permute(r[2], perm, CodeGroup::compilable)};
  }

  HostValue to_host(const Tensor& x) const override {
    if (auto* sink = templar::detail::active_capture) sink->on_materialize(x);
    return HostValue::from_array(x.array());
  }

 protected:
  static std::vector<Array> one(Array a) {
    std::vector<Array> v;
    v.push_back(std::move(a));
    return v;
  }

  // Hook: turn kernel outputs into tensors owned by this backend.
  virtual std::vector<Tensor> wrap(const OpDef& def, std::span<const Tensor> inputs, std::span<const Array> in,
                                   std::vector<Array> out) const = 0;

  Tensor run(const OpDef& def, std::initializer_list<Tensor> inputs = {}) const {
    return apply(def, std::span<const Tensor>(inputs.begin(), inputs.size()))[0];
  }
  Tensor run_all(const OpDef& def, std::span<const Tensor> inputs) const { return apply(def, inputs)[0]; }

  Tensor constant(Array a) const {
    return run({"array", CodeGroup::backend, [a = std::move(a)](auto) { return one(a); }, {}});
  }

  Tensor reshape_to(const Tensor& x, const Shape& target, std::string_view name,
                    CodeGroup group = CodeGroup::backend) const {
    return run({name, group, [target](std::span<const Array> in) { return one(in[0].reshaped(target)); },
                [](std::span<const Array> in, std::span<const Array>, const Array& g) {
                  return one(grad::f64(g).reshaped(in[0].shape()));
                }},
               {x});
  }

  Tensor permute(const Tensor& x, std::vector<std::size_t> perm, CodeGroup group) const {
    std::vector<std::size_t> inverse(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = i;
    return run({"transpose", group,
                [perm](std::span<const Array> in) { return one(kernels::transpose(in[0], perm)); },
                [inverse](std::span<const Array>, std::span<const Array>, const Array& g) {
                  return one(kernels::transpose(grad::f64(g), inverse));
                }},
               {x});
  }

 private:
  static Shape resolve_shape(const Shape& from, const Axes& spec) {
    std::int64_t known = 1;
    int infer = -1;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      if (spec[i] == -1) {
        if (infer >= 0) throw InvalidArgument("reshape: at most one -1 extent");
        infer = static_cast<int>(i);
      } else if (spec[i] < 0) {
        throw InvalidArgument("reshape: negative extent");
      } else {
        known *= spec[i];
      }
    }
    std::vector<std::int64_t> e(spec.begin(), spec.end());
    if (infer >= 0) {
      if (known == 0 || from.numel() % known != 0) {
        throw InvalidArgument("reshape: cannot infer extent for " + from.str());
      }
      e[static_cast<std::size_t>(infer)] = from.numel() / known;
    }
    Shape s(std::move(e));
    if (s.numel() != from.numel()) {
      throw InvalidArgument("reshape: element count mismatch " + from.str() + " -> " + s.str());
    }
    return s;
  }

  static Array sum_leading(const Array& g) {
    const std::size_t ax = 0;
    auto plan = kernels::plan_reduce(g.shape(), std::span<const std::size_t>(&ax, 1), false);
    return kernels::reduce(g, kernels::Reduction::sum, plan);
  }

  static Array zero_grad(const Array& in, const Array&, const Array&) { return Array(in.shape(), DType::float64); }

  template <class Fn, class Back>
  Tensor unary(const Tensor& x, std::string_view name, Fn fn, Back back) const {
    OpDef def{name, CodeGroup::backend,
              [fn, name](std::span<const Array> in) { return one(kernels::map_float(in[0], name, fn)); },
              [back](std::span<const Array> in, std::span<const Array> out, const Array& g) {
                return one(back(in[0], out[0], g));
              }};
    return run(std::move(def), {x});
  }

  // back(in, out, g) -> pair of broadcast-shaped gradients; reduced here.
  template <class Back>
  Tensor binary(kernels::BinaryOp op, const Tensor& a, const Tensor& b, Back back) const {
    OpDef def{kernels::binary_name(op), CodeGroup::backend,
              [op](std::span<const Array> in) {
                return one(kernels::binary(op, in[0], in[1], broadcast_shapes(in[0].shape(), in[1].shape())));
              },
              [back](std::span<const Array> in, std::span<const Array> out, const Array& g) {
                auto [ga, gb] = back(in, out, g);
                const Shape& s = out[0].shape();
                return std::vector<Array>{kernels::unbroadcast(kernels::broadcast_to(ga, s), in[0].shape()),
                                          kernels::unbroadcast(kernels::broadcast_to(gb, s), in[1].shape())};
              }};
    return run(std::move(def), {a, b});
  }

  Tensor reduce(const Tensor& x, kernels::Reduction kind, std::string_view name, std::optional<std::int64_t> axis,
                bool keepdims) const {
    auto plan = eager([&] {
      std::vector<std::size_t> axes;
      if (axis) {
        axes.push_back(normalize_axis(*axis, x.rank()));
      } else {
        axes.resize(x.rank());
        std::iota(axes.begin(), axes.end(), std::size_t{0});
      }
      return kernels::plan_reduce(x.shape(), axes, keepdims);
    });
    OpDef def{name, CodeGroup::backend,
              [kind, plan](std::span<const Array> in) { return one(kernels::reduce(in[0], kind, plan)); },
              [kind, plan](std::span<const Array> in, std::span<const Array>, const Array& g) {
                const Shape& in_shape = in[0].shape();
                const Array gk = grad::f64(g).reshaped(plan.kept_shape);
                if (kind == kernels::Reduction::sum || kind == kernels::Reduction::mean) {
                  Array full = kernels::broadcast_to(gk, in_shape);
                  if (kind == kernels::Reduction::mean) {
                    const double n = static_cast<double>(plan.group_size);
                    full = grad::map(full, [n](double v) { return v / n; });
                  }
                  return one(full);
                }
                // min/max: the whole gradient goes to the first extremum.
                const auto arg = kernels::reduce_arg(in[0], kind, plan);
                std::vector<double> out(static_cast<std::size_t>(in_shape.numel()), 0.0);
                const auto gv = gk.to_doubles();
                for (std::size_t i = 0; i < arg.size(); ++i) {
                  if (arg[i] >= 0) out[static_cast<std::size_t>(arg[i])] += gv[i];
                }
                return one(kernels::from_doubles(in_shape, out, DType::float64));
              }};
    return run(std::move(def), {x});
  }
};

}  // namespace templar::backends
