#pragma once

#include <cassert>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "templar/core/dtype.hpp"
#include "templar/core/shape.hpp"

namespace templar {

using Storage = std::variant<std::vector<float>, std::vector<double>, std::vector<std::int32_t>,
                             std::vector<std::int64_t>, std::vector<std::uint8_t>>;

// Contiguous row-major buffer with its dtype and shape. The buffer is shared
// between copies and treated as immutable once the array leaves the kernel
// that filled it; reshape shares the buffer.
class Array {
 public:
  Array() : Array(Shape{}, DType::float64) {}

  // Zero-filled array.
  Array(Shape shape, DType dtype) : shape_(std::move(shape)), dtype_(dtype) {
    const auto n = static_cast<std::size_t>(shape_.numel());
    storage_ = visit_dtype(dtype_, [n](auto d) -> std::shared_ptr<Storage> {
      using T = element_t<decltype(d)::value>;
      return std::make_shared<Storage>(std::vector<T>(n, T{}));
    });
  }

  template <class T>
  static Array from_vector(Shape shape, std::vector<T> values) {
    if (static_cast<std::int64_t>(values.size()) != shape.numel()) {
      throw InvalidArgument("buffer of " + std::to_string(values.size()) +
                            " elements does not match shape " + shape.str());
    }
    Array a;
    a.shape_ = std::move(shape);
    a.dtype_ = dtype_of<T>();
    a.storage_ = std::make_shared<Storage>(std::move(values));
    return a;
  }

  static Array scalar(double value, DType dtype) {
    Array a(Shape{}, dtype);
    a.set_from_double(0, value);
    return a;
  }

  const Shape& shape() const noexcept { return shape_; }
  DType dtype() const noexcept { return dtype_; }
  std::int64_t numel() const noexcept { return shape_.numel(); }
  std::size_t rank() const noexcept { return shape_.rank(); }

  template <DType D>
  std::span<const element_t<D>> values() const {
    assert(D == dtype_);
    return std::get<std::vector<element_t<D>>>(*storage_);
  }

  // Writable view; only for arrays freshly created by a kernel.
  template <DType D>
  std::span<element_t<D>> mutable_values() {
    assert(D == dtype_);
    return std::get<std::vector<element_t<D>>>(*storage_);
  }

  double get_double(std::int64_t i) const {
    return std::visit([i](const auto& v) { return static_cast<double>(v[static_cast<std::size_t>(i)]); },
                      *storage_);
  }

  void set_from_double(std::int64_t i, double value) {
    std::visit(
        [i, value](auto& v) {
          using T = typename std::decay_t<decltype(v)>::value_type;
          if constexpr (std::is_same_v<T, std::uint8_t>) {
            v[static_cast<std::size_t>(i)] = value != 0.0;
          } else {
            v[static_cast<std::size_t>(i)] = static_cast<T>(value);
          }
        },
        *storage_);
  }

  // All elements widened to double (row-major).
  std::vector<double> to_doubles() const {
    return std::visit(
        [](const auto& v) {
          std::vector<double> out(v.size());
          for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<double>(v[i]);
          return out;
        },
        *storage_);
  }

  Array reshaped(Shape shape) const {
    if (shape.numel() != numel()) {
      throw InvalidArgument("cannot reshape " + shape_.str() + " into " + shape.str());
    }
    Array a = *this;
    a.shape_ = std::move(shape);
    return a;
  }

  bool same_buffer(const Array& other) const noexcept { return storage_ == other.storage_; }

  template <class T>
  static constexpr DType dtype_of() {
    if constexpr (std::is_same_v<T, float>) return DType::float32;
    else if constexpr (std::is_same_v<T, double>) return DType::float64;
    else if constexpr (std::is_same_v<T, std::int32_t>) return DType::int32;
    else if constexpr (std::is_same_v<T, std::int64_t>) return DType::int64;
    else {
      static_assert(std::is_same_v<T, std::uint8_t>, "unsupported element type");
      return DType::boolean;
    }
  }

 private:
  Shape shape_;
  DType dtype_ = DType::float64;
  std::shared_ptr<Storage> storage_;
};

}  // namespace templar
