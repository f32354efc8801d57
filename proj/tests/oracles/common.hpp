#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "templar/templar.hpp"

namespace templar::oracle {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline std::int64_t integer(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline Shape random_shape(Rng& rng, int min_rank, int max_rank, std::int64_t max_extent = 4) {
  const auto rank = integer(rng, min_rank, max_rank);
  std::vector<std::int64_t> e;
  for (std::int64_t i = 0; i < rank; ++i) e.push_back(integer(rng, 1, max_extent));
  return Shape(e);
}

// Values drawn by gen(rng), float64.
template <class Gen>
Array random_array(Rng& rng, const Shape& s, Gen gen) {
  std::vector<double> v(static_cast<std::size_t>(s.numel()));
  for (auto& x : v) x = gen(rng);
  return kernels::from_doubles(s, v, DType::float64);
}

inline Array random_array(Rng& rng, const Shape& s, double lo = -1.0, double hi = 1.0) {
  return random_array(rng, s, [lo, hi](Rng& r) { return uniform(r, lo, hi); });
}

inline Array index_array(const std::vector<std::int64_t>& v, const Shape& s) {
  return Array::from_vector<std::int64_t>(s, v);
}

// Shape b broadcastable against a: a suffix of a with some extents set to 1.
inline Shape broadcast_partner(Rng& rng, const Shape& a) {
  const auto keep = integer(rng, 0, static_cast<std::int64_t>(a.rank()));
  std::vector<std::int64_t> e(a.end() - keep, a.end());
  for (auto& x : e) {
    if (integer(rng, 0, 2) == 0) x = 1;
  }
  return Shape(e);
}

inline std::vector<Tensor> on(const Backend& b, const std::vector<Array>& arrays) {
  std::vector<Tensor> t;
  for (const auto& a : arrays) t.push_back(b.array(a.to_doubles(), a.shape(), a.dtype()));
  return t;
}

// The bundled obstacle scene, float64 on backend b.
struct Scene {
  Tensor ext_mats;
  Tensor dims;
};

inline std::vector<double> appendix_c_ext_mats() {
  return {0.00,  1.00,  -0.00, 0.03,  -1.00, 0.00,  -0.00, -0.60, -0.00, 0.00,  1.00, -0.45,
          -1.00, 0.00,  -0.00, 0.28,  -0.00, -1.00, 0.00,  -0.65, -0.00, 0.00,  1.00, -0.45,
          1.00,  -0.00, 0.00,  -0.30, 0.00,  1.00,  -0.00, 0.00,  -0.00, 0.00,  1.00, -0.37,
          1.00,  -0.00, 0.00,  -0.17, 0.00,  1.00,  0.00,  0.02,  -0.00, 0.00,  1.00, -1.03};
}
inline std::vector<double> appendix_c_dims() {
  return {0.40, 0.45, 0.91, 0.40, 0.45, 0.91, 1.60, 1.10, 0.75, 0.40, 0.40, 0.56};
}

inline Scene appendix_c_scene(const Backend& b) {
  return {b.array(appendix_c_ext_mats(), Shape{4, 3, 4}, DType::float64),
          b.array(appendix_c_dims(), Shape{4, 3}, DType::float64)};
}

}  // namespace templar::oracle
