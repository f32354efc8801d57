#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

#include "templar/core/error.hpp"

namespace templar {

// Closed set of element types. There is no promotion lattice: binary ops
// require both operands to carry the same tag.
enum class DType : std::uint8_t { float32, float64, int32, int64, boolean };

inline constexpr std::array<DType, 5> kAllDTypes = {DType::float32, DType::float64, DType::int32,
                                                    DType::int64, DType::boolean};

inline constexpr std::string_view dtype_name(DType dt) {
  switch (dt) {
    case DType::float32: return "float32";
    case DType::float64: return "float64";
    case DType::int32: return "int32";
    case DType::int64: return "int64";
    case DType::boolean: return "bool";
  }
  return "?";
}

inline DType parse_dtype(std::string_view name) {
  for (DType dt : kAllDTypes) {
    if (dtype_name(dt) == name) return dt;
  }
  throw InvalidDType("unknown dtype name '" + std::string(name) + "'");
}

inline constexpr bool is_floating(DType dt) { return dt == DType::float32 || dt == DType::float64; }
inline constexpr bool is_integral(DType dt) { return dt == DType::int32 || dt == DType::int64; }

// Storage element type for each tag. Booleans are stored one byte each.
template <DType D> struct dtype_traits;
template <> struct dtype_traits<DType::float32> { using type = float; };
template <> struct dtype_traits<DType::float64> { using type = double; };
template <> struct dtype_traits<DType::int32> { using type = std::int32_t; };
template <> struct dtype_traits<DType::int64> { using type = std::int64_t; };
template <> struct dtype_traits<DType::boolean> { using type = std::uint8_t; };

template <DType D>
using element_t = typename dtype_traits<D>::type;

// Calls fn(std::integral_constant<DType, D>{}) for the runtime tag.
template <class Fn>
decltype(auto) visit_dtype(DType dt, Fn&& fn) {
  switch (dt) {
    case DType::float32: return fn(std::integral_constant<DType, DType::float32>{});
    case DType::float64: return fn(std::integral_constant<DType, DType::float64>{});
    case DType::int32: return fn(std::integral_constant<DType, DType::int32>{});
    case DType::int64: return fn(std::integral_constant<DType, DType::int64>{});
    case DType::boolean: return fn(std::integral_constant<DType, DType::boolean>{});
  }
  throw InvalidDType("corrupt dtype tag");
}

}  // namespace templar
