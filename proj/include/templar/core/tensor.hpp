#pragma once

#include <cstdint>
#include <memory>
#include <string_view>

#include "templar/core/array.hpp"

namespace templar {

class Backend;

// Position of a tensor on an autodiff tape. A tag only counts while the tape
// with that id is the active one on the current thread.
struct GradTag {
  std::uint64_t tape_id = 0;
  std::int64_t node = -1;
};

// Immutable tensor value tagged with the backend that produced it. Copies share
// the payload. dtype and shape never require backend computation.
class Tensor {
 public:
  Tensor() = default;
  Tensor(const Backend* backend, Array array, GradTag tag = {})
      : impl_(std::make_shared<const Impl>(Impl{backend, std::move(array), tag})) {}

  bool defined() const noexcept { return impl_ != nullptr; }

  const Backend& backend() const { return *impl_->backend; }
  std::string_view backend_id() const;  // defined in backend.hpp

  DType dtype() const { return impl_->array.dtype(); }
  const Shape& shape() const { return impl_->array.shape(); }
  std::size_t rank() const { return impl_->array.rank(); }
  std::int64_t numel() const { return impl_->array.numel(); }

  // Backend payload. Backends in this library share the host Array format.
  const Array& array() const { return impl_->array; }
  const GradTag& grad_tag() const { return impl_->tag; }

  // Identity of the underlying value, stable across copies of this handle.
  const void* identity() const noexcept { return impl_.get(); }

 private:
  struct Impl {
    const Backend* backend;
    Array array;
    GradTag tag;
  };
  std::shared_ptr<const Impl> impl_;
};

}  // namespace templar
