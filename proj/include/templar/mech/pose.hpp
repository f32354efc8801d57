#pragma once

// Orientation and pose conversions. Functions take the backend as an optional
// trailing argument; when omitted the handler picks one.

#include <string>

#include "templar/ops.hpp"

namespace templar::mech {

namespace detail {

inline void require_trailing(const Tensor& x, std::int64_t n, const char* fn) {
  if (x.rank() == 0 || x.shape()[x.rank() - 1] != n) {
    throw InvalidArgument(std::string(fn) + ": expected trailing extent " + std::to_string(n) + ", got shape " +
                          x.shape().str());
  }
}

inline Axes leading(const Tensor& x, std::initializer_list<std::int64_t> tail) {
  Axes a(x.shape().begin(), x.shape().end() - 1);
  a.insert(a.end(), tail);
  return a;
}

}  // namespace detail

// plr [..., 3] = (phi azimuth, theta inclination from +z, r) -> cartesian [..., 3]
inline Tensor plr_to_cart(const Tensor& plr, const Backend* f = nullptr) {
  const Backend& b = get_framework(f, plr);
  detail::require_trailing(plr, 3, "plr_to_cart");
  const Tensor phi = b.slice(plr, -1, 0, 1);
  const Tensor theta = b.slice(plr, -1, 1, 2);
  const Tensor r = b.slice(plr, -1, 2, 3);
  const Tensor r_sin = b.mul(r, b.sin(theta));
  const Tensor xyz[] = {b.mul(r_sin, b.cos(phi)), b.mul(r_sin, b.sin(phi)), b.mul(r, b.cos(theta))};
  return b.concatenate(xyz, -1);
}

// Below this angle the Rodrigues coefficients are evaluated at the floor,
// where they equal their limits 1 and 1/2 to double precision.
inline constexpr double kSmallAngle = 1e-8;

// pose [..., 6] = (x, y, z, rotation vector) -> [..., 3, 4] = [R | t]
// R = I + (sin a / a) S + ((1 - cos a) / a^2) S^2 with S = skew(v), a = |v|.
inline Tensor rot_vec_pose_to_mat_pose(const Tensor& pose, const Backend* f = nullptr) {
  const Backend& b = get_framework(f, pose);
  detail::require_trailing(pose, 6, "rot_vec_pose_to_mat_pose");
  const DType dt = pose.dtype();
  const Tensor t = b.slice(pose, -1, 0, 3);
  const Tensor vx = b.slice(pose, -1, 3, 4);
  const Tensor vy = b.slice(pose, -1, 4, 5);
  const Tensor vz = b.slice(pose, -1, 5, 6);
  const Tensor zero = b.zeros(vx.shape(), dt);

  const Tensor entries[] = {zero, b.negative(vz), vy, vz, zero, b.negative(vx), b.negative(vy), vx, zero};
  const Tensor skew = b.reshape(b.concatenate(entries, -1), detail::leading(vx, {3, 3}));

  const Tensor sq = b.add(b.add(b.mul(vx, vx), b.mul(vy, vy)), b.mul(vz, vz));
  const Tensor angle = b.sqrt(b.maximum(sq, b.full(Shape{}, kSmallAngle * kSmallAngle, dt)));
  const Tensor half_sin = b.sin(b.mul(angle, b.full(Shape{}, 0.5, dt)));
  // (1 - cos a) written as 2 sin^2(a/2) to avoid cancellation.
  const Tensor c1 = b.div(b.sin(angle), angle);
  const Tensor c2 = b.div(b.mul(b.full(Shape{}, 2.0, dt), b.mul(half_sin, half_sin)), b.mul(angle, angle));

  const Tensor eye = b.array(HostValue{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}, dt);
  const Tensor rot = b.add(b.add(eye, b.mul(b.expand_dims(c1, -1), skew)),
                           b.mul(b.expand_dims(c2, -1), b.matmul(skew, skew)));
  const Tensor parts[] = {rot, b.expand_dims(t, -1)};
  return b.concatenate(parts, -1);
}

}  // namespace templar::mech
