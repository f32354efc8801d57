#pragma once

// Signed distances to oriented cuboids. ext_mats [M, 3, 4] map world points
// into each cuboid's local frame; dims [M, 3] are full edge lengths.

#include <string>

#include "templar/ops.hpp"

namespace templar::vision {

namespace detail {

inline void check_cuboids(const Tensor& ext_mats, const Tensor& dims, const Tensor& query) {
  const bool ok = ext_mats.rank() == 3 && ext_mats.shape()[1] == 3 && ext_mats.shape()[2] == 4 && dims.rank() == 2 &&
                  dims.shape()[1] == 3 && dims.shape()[0] == ext_mats.shape()[0] && query.rank() >= 2 &&
                  query.shape()[query.rank() - 1] == 3;
  if (!ok) {
    throw InvalidArgument("cuboid_signed_distances: ext_mats " + ext_mats.shape().str() + ", dims " +
                          dims.shape().str() + ", queries " + query.shape().str() +
                          " (expected [M,3,4], [M,3], [...,N,3])");
  }
}

}  // namespace detail

// query [..., N, 3] -> [..., N, M]; negative inside, exact Euclidean outside.
inline Tensor cuboid_signed_distances(const Tensor& ext_mats, const Tensor& dims, const Tensor& query,
                                      const Backend* f = nullptr) {
  const Backend& b = get_framework(f, ext_mats, dims, query);
  detail::check_cuboids(ext_mats, dims, query);
  const std::int64_t m = ext_mats.shape()[0];
  const DType dt = query.dtype();

  Axes ones_shape(query.shape().begin(), query.shape().end() - 1);
  ones_shape.push_back(1);
  const Tensor homog_parts[] = {query, b.ones(Shape(ones_shape), dt)};
  const Tensor homog = b.concatenate(homog_parts, -1);

  // All cuboid transforms as one [4, 3M] matrix.
  const Tensor stacked = b.transpose(b.reshape(ext_mats, {3 * m, 4}));
  Axes local_shape(query.shape().begin(), query.shape().end() - 1);
  local_shape.insert(local_shape.end(), {m, 3});
  const Tensor local = b.reshape(b.matmul(homog, stacked), local_shape);

  const Tensor q = b.sub(b.abs(local), b.mul(dims, b.full(Shape{}, 0.5, dt)));
  const Tensor q_out = b.maximum(q, b.zeros(Shape{}, dt));
  const Tensor outside = b.sqrt(b.reduce_sum(b.mul(q_out, q_out), -1));
  const Tensor inside = b.minimum(b.reduce_max(q, -1), b.zeros(Shape{}, dt));
  return b.add(outside, inside);
}

// Scene-wide distance: min over cuboids, [..., N, 1].
inline Tensor scene_sdf(const Tensor& ext_mats, const Tensor& dims, const Tensor& query, const Backend* f = nullptr) {
  const Backend& b = get_framework(f, ext_mats, dims, query);
  return b.reduce_min(cuboid_signed_distances(ext_mats, dims, query, &b), -1, true);
}

}  // namespace templar::vision
