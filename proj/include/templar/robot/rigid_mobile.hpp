#pragma once

#include <string>

#include "templar/ops.hpp"

namespace templar::robot {

// A robot modelled as body points rigidly attached to a single pose.
class RigidMobile {
 public:
  // rel_body_points [P, 3] in the robot frame.
  explicit RigidMobile(Tensor rel_body_points, const Backend* f = nullptr) : f_(f) {
    const Tensor& p = rel_body_points;
    if (p.rank() != 2 || p.shape()[1] != 3 || p.shape()[0] < 1) {
      throw InvalidArgument("RigidMobile: body points must be [P, 3] with P >= 1, got " + p.shape().str());
    }
    const Backend& b = get_framework(f_, p);
    // Homogeneous body points, transposed once: [4, P].
    const Tensor parts[] = {p, b.ones(Shape{p.shape()[0], 1}, p.dtype())};
    homog_t_ = b.transpose(b.concatenate(parts, -1));
    points_ = std::move(rel_body_points);
  }

  const Tensor& rel_body_points() const noexcept { return points_; }
  std::int64_t num_points() const { return points_.shape()[0]; }

  // inv_ext_mats [..., 3, 4] (body -> world) -> world points [..., P, 3]
  Tensor sample_body(const Tensor& inv_ext_mats) const {
    const Tensor& m = inv_ext_mats;
    if (m.rank() < 2 || m.shape()[m.rank() - 2] != 3 || m.shape()[m.rank() - 1] != 4) {
      throw InvalidArgument("sample_body: pose matrices must be [..., 3, 4], got " + m.shape().str());
    }
    const Backend& b = get_framework(f_, m);
    std::vector<std::int64_t> perm(m.rank());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<std::int64_t>(i);
    std::swap(perm[perm.size() - 1], perm[perm.size() - 2]);
    return b.transpose(b.matmul(m, homog_t_), perm);
  }

 private:
  const Backend* f_;
  Tensor points_;
  Tensor homog_t_;
};

// points [T, ..., 3]: summed length of consecutive segments along the leading
// axis over every trailing batch/point axis. Squared coordinate deltas are
// floored at 1e-12 so stationary segments keep a finite gradient.
inline Tensor compute_length(const Tensor& points, const Backend* f = nullptr) {
  const Backend& b = get_framework(f, points);
  if (points.rank() < 2 || points.shape()[0] < 2) {
    throw InvalidArgument("compute_length: need [T, ..., 3] with T >= 2, got " + points.shape().str());
  }
  const std::int64_t t = points.shape()[0];
  const Tensor start = b.slice(points, 0, 0, t - 1);
  const Tensor end = b.slice(points, 0, 1, t);
  const Tensor delta = b.sub(end, start);
  const Tensor dists_sqrd = b.maximum(b.mul(delta, delta), b.full(Shape{}, 1e-12, points.dtype()));
  const Tensor distances = b.sqrt(b.reduce_sum(dists_sqrd, -1));
  return b.reduce_sum(distances);
}

}  // namespace templar::robot
