#pragma once

// Natural cubic spline sampling as a fixed linear map. The basis B [S, A] is
// built on the host from the anchor and query times; the path is B . values,
// so it is exactly linear in the anchor values.

#include <string>
#include <vector>

#include "templar/ops.hpp"

namespace templar::robot {

namespace detail {

inline std::vector<double> column_times(const Backend& b, const Tensor& t, const char* what) {
  if (t.rank() != 2 || t.shape()[1] != 1) {
    throw InvalidArgument(std::string("sample_spline_path: ") + what + " must be [K, 1], got " + t.shape().str());
  }
  return b.to_host(t).flatten();
}

}  // namespace detail

// Row s holds the weights of each anchor at query time q[s]. Natural end
// conditions (zero second derivative). Anchor times must be strictly increasing
// and every query must lie within [t.front(), t.back()].
inline std::vector<double> natural_cubic_basis(const std::vector<double>& t, const std::vector<double>& q) {
  const std::size_t a = t.size();
  if (a < 2) throw InvalidArgument("spline needs at least 2 anchors, got " + std::to_string(a));
  for (std::size_t i = 1; i < a; ++i) {
    if (!(t[i] > t[i - 1])) throw InvalidArgument("spline anchor times must be strictly increasing");
  }
  for (double v : q) {
    if (!(v >= t.front() && v <= t.back())) {
      throw InvalidArgument("spline query time " + std::to_string(v) + " outside the anchor range");
    }
  }

  std::vector<double> h(a - 1);
  for (std::size_t i = 0; i + 1 < a; ++i) h[i] = t[i + 1] - t[i];

  // Second derivatives for unit values at each anchor: m[j][i] = M_i for y = e_j.
  // Interior system: h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = rhs[i].
  std::vector<std::vector<double>> m(a, std::vector<double>(a, 0.0));
  if (a > 2) {
    const std::size_t k = a - 2;
    std::vector<double> diag(k), upper(k), lower(k);
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t i = r + 1;
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      lower[r] = h[i - 1];
      upper[r] = h[i];
    }
    for (std::size_t j = 0; j < a; ++j) {
      std::vector<double> rhs(k, 0.0);
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = r + 1;
        const double yp = j == i + 1 ? 1.0 : 0.0, y = j == i ? 1.0 : 0.0, ym = j == i - 1 ? 1.0 : 0.0;
        rhs[r] = 6.0 * ((yp - y) / h[i] - (y - ym) / h[i - 1]);
      }
      // Thomas algorithm
      std::vector<double> c(k), d(k);
      c[0] = upper[0] / diag[0];
      d[0] = rhs[0] / diag[0];
      for (std::size_t r = 1; r < k; ++r) {
        const double den = diag[r] - lower[r] * c[r - 1];
        c[r] = upper[r] / den;
        d[r] = (rhs[r] - lower[r] * d[r - 1]) / den;
      }
      for (std::size_t r = k; r-- > 0;) {
        const double x = d[r] - (r + 1 < k ? c[r] * m[j][r + 2] : 0.0);
        m[j][r + 1] = x;
      }
    }
  }

  std::vector<double> basis(q.size() * a, 0.0);
  for (std::size_t s = 0; s < q.size(); ++s) {
    std::size_t i = 0;
    while (i + 2 < a && q[s] > t[i + 1]) ++i;
    const double hi = h[i];
    const double l = (t[i + 1] - q[s]) / hi;  // weight of the left anchor
    const double r = (q[s] - t[i]) / hi;
    for (std::size_t j = 0; j < a; ++j) {
      const double yl = j == i ? 1.0 : 0.0, yr = j == i + 1 ? 1.0 : 0.0;
      const double ml = m[j][i], mr = m[j][i + 1];
      basis[s * a + j] = yl * l + yr * r + (ml * (l * l * l - l) + mr * (r * r * r - r)) * hi * hi / 6.0;
    }
  }
  return basis;
}

// anchor_times [A, 1], anchor_values [..., A, D], query_times [S, 1] -> [..., S, D]
inline Tensor sample_spline_path(const Tensor& anchor_times, const Tensor& anchor_values, const Tensor& query_times,
                                 const Backend* f = nullptr) {
  const Backend& b = get_framework(f, anchor_times, anchor_values, query_times);
  const auto t = detail::column_times(b, anchor_times, "anchor times");
  const auto q = detail::column_times(b, query_times, "query times");
  if (anchor_values.rank() < 2 || anchor_values.shape()[anchor_values.rank() - 2] != static_cast<std::int64_t>(t.size())) {
    throw InvalidArgument("sample_spline_path: anchor values " + anchor_values.shape().str() + " do not match " +
                          std::to_string(t.size()) + " anchor times");
  }
  const auto basis = natural_cubic_basis(t, q);
  const Tensor bm = b.array(basis, Shape{static_cast<std::int64_t>(q.size()), static_cast<std::int64_t>(t.size())},
                            anchor_values.dtype());
  return b.matmul(bm, anchor_values);
}

}  // namespace templar::robot
