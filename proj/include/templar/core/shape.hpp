#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "templar/core/error.hpp"

namespace templar {

// Row-major extents. Rank 0 is a scalar with one element.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::int64_t> extents) : extents_(extents) { validate(); }
  explicit Shape(std::vector<std::int64_t> extents) : extents_(std::move(extents)) { validate(); }

  std::size_t rank() const noexcept { return extents_.size(); }
  std::int64_t numel() const noexcept {
    return std::accumulate(extents_.begin(), extents_.end(), std::int64_t{1}, std::multiplies<>());
  }
  std::int64_t operator[](std::size_t i) const { return extents_[i]; }
  std::int64_t at(std::int64_t axis) const { return extents_.at(static_cast<std::size_t>(axis)); }

  const std::vector<std::int64_t>& extents() const noexcept { return extents_; }
  auto begin() const noexcept { return extents_.begin(); }
  auto end() const noexcept { return extents_.end(); }

  // Row-major strides in elements.
  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(extents_.size(), 1);
    for (std::size_t i = extents_.size(); i-- > 1;) s[i - 1] = s[i] * extents_[i];
    return s;
  }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < extents_.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(extents_[i]);
    }
    if (extents_.size() == 1) out += ",";
    return out + ")";
  }

 private:
  void validate() const {
    for (auto e : extents_) {
      if (e < 0) throw InvalidArgument("negative extent in shape " + str());
    }
  }

  std::vector<std::int64_t> extents_;
};

// Maps a possibly negative axis into [0, rank). `rank` is the number of
// valid positions (rank + 1 for expand_dims).
inline std::size_t normalize_axis(std::int64_t axis, std::size_t rank) {
  const auto r = static_cast<std::int64_t>(rank);
  if (axis < -r || axis >= r) {
    throw InvalidArgument("axis " + std::to_string(axis) + " out of range for rank " +
                          std::to_string(rank));
  }
  return static_cast<std::size_t>(axis < 0 ? axis + r : axis);
}

// Trailing-aligned broadcast of two shapes.
inline Shape broadcast_shapes(const Shape& a, const Shape& b) {
  const std::size_t rank = std::max(a.rank(), b.rank());
  std::vector<std::int64_t> out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::int64_t da = i < rank - a.rank() ? 1 : a[i - (rank - a.rank())];
    const std::int64_t db = i < rank - b.rank() ? 1 : b[i - (rank - b.rank())];
    if (da != db && da != 1 && db != 1) {
      throw InvalidArgument("shapes " + a.str() + " and " + b.str() + " do not broadcast");
    }
    out[i] = da == 1 ? db : da;
  }
  return Shape(std::move(out));
}

// Strides of `in` viewed as broadcast to `out` (zero along broadcast axes).
inline std::vector<std::int64_t> broadcast_strides(const Shape& in, const Shape& out) {
  std::vector<std::int64_t> s(out.rank(), 0);
  const auto in_strides = in.strides();
  const std::size_t offset = out.rank() - in.rank();
  for (std::size_t i = 0; i < in.rank(); ++i) {
    s[i + offset] = in[i] == 1 ? 0 : in_strides[i];
  }
  return s;
}

// Odometer over a multi-index; returns false after the last position.
inline bool next_index(std::span<std::int64_t> index, const Shape& shape) {
  for (std::size_t i = shape.rank(); i-- > 0;) {
    if (++index[i] < shape[i]) return true;
    index[i] = 0;
  }
  return false;
}

}  // namespace templar
