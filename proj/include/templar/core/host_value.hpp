#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "templar/core/array.hpp"

namespace templar {

// Nested host representation of a tensor: a scalar or a list of HostValues,
// mirroring the shape row-major. Produced by to_host, accepted by array().
class HostValue {
 public:
  using List = std::vector<HostValue>;

  HostValue() : value_(0.0) {}
  HostValue(double v) : value_(v) {}
  HostValue(int v) : value_(static_cast<std::int64_t>(v)) {}
  HostValue(std::int64_t v) : value_(v) {}
  HostValue(bool v) : value_(v) {}
  HostValue(List items) : value_(std::move(items)) {}
  HostValue(std::initializer_list<HostValue> items) : value_(List(items)) {}

  bool is_list() const noexcept { return std::holds_alternative<List>(value_); }
  const List& list() const { return std::get<List>(value_); }

  double as_double() const {
    if (auto p = std::get_if<double>(&value_)) return *p;
    if (auto p = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*p);
    if (auto p = std::get_if<bool>(&value_)) return *p ? 1.0 : 0.0;
    throw InvalidArgument("host value is a list, not a scalar");
  }

  bool is_bool() const noexcept { return std::holds_alternative<bool>(value_); }
  bool is_int() const noexcept { return std::holds_alternative<std::int64_t>(value_); }

  // Shape implied by the nesting; ragged nesting is rejected.
  Shape shape() const {
    std::vector<std::int64_t> extents;
    const HostValue* cur = this;
    while (cur->is_list()) {
      extents.push_back(static_cast<std::int64_t>(cur->list().size()));
      if (cur->list().empty()) break;
      cur = &cur->list().front();
    }
    Shape s(std::move(extents));
    check_regular(*this, s, 0);
    return s;
  }

  // Row-major leaves.
  std::vector<double> flatten() const {
    std::vector<double> out;
    flatten_into(*this, out);
    return out;
  }

  friend bool operator==(const HostValue& a, const HostValue& b) {
    if (a.is_list() != b.is_list()) return false;
    if (a.is_list()) return a.list() == b.list();
    return a.as_double() == b.as_double();
  }

  static HostValue from_array(const Array& a) {
    std::size_t offset = 0;
    return build(a, 0, offset);
  }

 private:
  static void check_regular(const HostValue& v, const Shape& s, std::size_t depth) {
    if (depth == s.rank()) {
      if (v.is_list()) throw InvalidArgument("ragged nested host value");
      return;
    }
    if (!v.is_list() || static_cast<std::int64_t>(v.list().size()) != s[depth]) {
      throw InvalidArgument("ragged nested host value");
    }
    for (const auto& item : v.list()) check_regular(item, s, depth + 1);
  }

  static void flatten_into(const HostValue& v, std::vector<double>& out) {
    if (!v.is_list()) {
      out.push_back(v.as_double());
      return;
    }
    for (const auto& item : v.list()) flatten_into(item, out);
  }

  static HostValue build(const Array& a, std::size_t depth, std::size_t& offset) {
    if (depth == a.rank()) {
      const auto i = static_cast<std::int64_t>(offset++);
      switch (a.dtype()) {
        case DType::boolean: return HostValue(a.get_double(i) != 0.0);
        case DType::int32:
        case DType::int64: return HostValue(static_cast<std::int64_t>(a.get_double(i)));
        default: return HostValue(a.get_double(i));
      }
    }
    List items;
    items.reserve(static_cast<std::size_t>(a.shape()[depth]));
    for (std::int64_t i = 0; i < a.shape()[depth]; ++i) items.push_back(build(a, depth + 1, offset));
    return HostValue(std::move(items));
  }

  std::variant<double, std::int64_t, bool, List> value_;
};

}  // namespace templar
