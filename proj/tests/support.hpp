#pragma once

#include <gtest/gtest.h>

#include <vector>

#include "templar/templar.hpp"

namespace templar::testing {

inline std::vector<double> vals(const Tensor& t) { return t.array().to_doubles(); }

inline const Backend& host() { return host_backend(); }
inline const Backend& ad() { return autodiff_backend(); }

// Tensor from flat values and extents on backend b.
inline Tensor make(const Backend& b, std::vector<double> v, std::vector<std::int64_t> shape,
                   DType dt = DType::float64) {
  return b.array(v, Shape(std::move(shape)), dt);
}

inline void expect_near_all(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "at " << i;
}

}  // namespace templar::testing
