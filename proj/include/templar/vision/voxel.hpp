#pragma once

#include <array>
#include <optional>
#include <string>

#include "templar/ops.hpp"

namespace templar::vision {

struct VoxelBounds {
  Tensor min;  // [..., 3]
  Tensor max;  // [..., 3]
};

struct VoxelGrid {
  Tensor features;  // [..., dx, dy, dz, C], summed per voxel
  Tensor counts;    // [..., dx, dy, dz, 1]
  VoxelBounds bounds;
};

// Scatters coords [..., N, 3] with features [..., N, C] into a res grid.
// Bounds default to the per-batch min/max of coords. A point on the upper
// bound lands in the last voxel; an axis with zero extent maps to index 0.
inline VoxelGrid coords_to_voxel_grid(const Tensor& coords, const std::array<std::int64_t, 3>& res,
                                      const Tensor& features, const std::optional<VoxelBounds>& bounds = std::nullopt,
                                      const Backend* f = nullptr) {
  const Backend& b = get_framework(f, coords, features);
  const std::size_t rank = coords.rank();
  if (rank < 2 || coords.shape()[rank - 1] != 3) {
    throw InvalidArgument("coords_to_voxel_grid: coords must be [..., N, 3], got " + coords.shape().str());
  }
  const std::int64_t n = coords.shape()[rank - 2];
  if (n == 0) throw InvalidArgument("coords_to_voxel_grid: no points");
  if (features.rank() != rank || features.shape()[rank - 2] != n) {
    throw InvalidArgument("coords_to_voxel_grid: features " + features.shape().str() + " do not match coords " +
                          coords.shape().str());
  }
  for (auto r : res) {
    if (r < 1) throw InvalidArgument("coords_to_voxel_grid: resolution extents must be >= 1");
  }
  const std::int64_t c = features.shape()[rank - 1];
  const std::int64_t batch = coords.numel() / (3 * n);
  const DType dt = coords.dtype();
  const Axes batch_shape(coords.shape().begin(), coords.shape().end() - 2);

  Axes bshape(batch_shape);
  bshape.push_back(3);
  const Tensor pts = b.reshape(coords, {batch, n, 3});
  Tensor lo, hi;
  if (bounds) {
    const Tensor zero = b.zeros(Shape(bshape), dt);
    lo = b.reshape(b.add(bounds->min, zero), {batch, 1, 3});
    hi = b.reshape(b.add(bounds->max, zero), {batch, 1, 3});
  } else {
    lo = b.reduce_min(pts, 1, true);
    hi = b.reduce_max(pts, 1, true);
  }

  const Tensor res_f = b.array(HostValue{static_cast<double>(res[0]), static_cast<double>(res[1]),
                                         static_cast<double>(res[2])},
                               dt);
  const Tensor extent = b.maximum(b.sub(hi, lo), b.full(Shape{}, 1e-30, dt));
  const Tensor scaled = b.floor(b.mul(b.div(b.sub(pts, lo), extent), res_f));
  const Tensor upper = b.sub(res_f, b.ones(Shape{}, dt));
  const Tensor cell = b.cast(b.maximum(b.minimum(scaled, upper), b.zeros(Shape{}, dt)), "int64");

  // Prefix every index tuple with its batch index.
  std::vector<double> bi(static_cast<std::size_t>(batch * n));
  for (std::size_t i = 0; i < bi.size(); ++i) bi[i] = static_cast<double>(static_cast<std::int64_t>(i) / n);
  const Tensor idx_parts[] = {b.array(bi, Shape{batch, n, 1}, DType::int64), cell};
  const Tensor indices = b.reshape(b.concatenate(idx_parts, -1), {batch * n, 4});

  Axes grid(batch_shape);
  grid.insert(grid.end(), res.begin(), res.end());
  Axes feat_grid = grid, count_grid = grid;
  feat_grid.push_back(c);
  count_grid.push_back(1);

  const Tensor feats = b.scatter_nd(indices, b.reshape(features, {batch * n, c}), Shape{batch, res[0], res[1], res[2], c});
  const Tensor counts = b.scatter_nd(indices, b.ones(Shape{batch * n, 1}, features.dtype()),
                                     Shape{batch, res[0], res[1], res[2], 1});

  return {b.reshape(feats, feat_grid), b.reshape(counts, count_grid),
          {b.reshape(lo, bshape), b.reshape(hi, bshape)}};
}

}  // namespace templar::vision
