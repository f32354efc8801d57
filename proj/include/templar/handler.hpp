#pragma once

// Backend selection. Priority: an explicit backend argument, then the
// innermost globally set backend, then the tag of the tensor arguments.

#include <cstdlib>
#include <mutex>
#include <ranges>
#include <shared_mutex>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "templar/backends/autodiff.hpp"
#include "templar/backends/host.hpp"

namespace templar {

// Resolves a backend id ("host" or "autodiff").
inline const Backend& backend_by_id(std::string_view id) {
  if (id == host_backend().id()) return host_backend();
  if (id == autodiff_backend().id()) return autodiff_backend();
  throw InvalidArgument("unknown backend '" + std::string(id) + "'");
}

namespace detail {

// Process-wide stack of globally set backends.
class DispatchContext {
 public:
  static DispatchContext& instance() {
    static DispatchContext ctx;
    return ctx;
  }

  void push(const Backend& b) {
    std::unique_lock lock(mutex_);
    stack_.push_back(&b);
  }

  void pop() {
    std::unique_lock lock(mutex_);
    if (stack_.empty()) throw StateError("unset_framework called with no framework set");
    stack_.pop_back();
  }

  const Backend* top() const {
    std::shared_lock lock(mutex_);
    return stack_.empty() ? nullptr : stack_.back();
  }

  std::size_t depth() const {
    std::shared_lock lock(mutex_);
    return stack_.size();
  }

 private:
  // TEMPLAR_BACKEND={host|autodiff} seeds the stack.
  DispatchContext() {
    if (const char* env = std::getenv("TEMPLAR_BACKEND"); env && *env) stack_.push_back(&backend_by_id(env));
  }

  mutable std::shared_mutex mutex_;
  std::vector<const Backend*> stack_;
};

// Collects the backend tags of tensor-like arguments; other values are ignored.
struct TagScan {
  const Backend* found = nullptr;
  bool mixed = false;

  void see(const Tensor& t) {
    if (!t.defined()) return;
    if (!found) {
      found = &t.backend();
    } else if (found != &t.backend()) {
      mixed = true;
    }
  }
  template <class T>
  void visit(const T& arg) {
    if constexpr (std::is_same_v<T, Tensor>) {
      see(arg);
    } else if constexpr (std::ranges::range<T>) {
      if constexpr (std::is_same_v<std::ranges::range_value_t<T>, Tensor>) {
        for (const Tensor& t : arg) see(t);
      }
    }
  }
};

}  // namespace detail

inline void set_framework(const Backend& f) { detail::DispatchContext::instance().push(f); }
inline void unset_framework() { detail::DispatchContext::instance().pop(); }
inline std::size_t framework_depth() { return detail::DispatchContext::instance().depth(); }

// Pushes a backend for the lifetime of the scope.
class FrameworkScope {
 public:
  explicit FrameworkScope(const Backend& f) { set_framework(f); }
  ~FrameworkScope() { unset_framework(); }
  FrameworkScope(const FrameworkScope&) = delete;
  FrameworkScope& operator=(const FrameworkScope&) = delete;
};

// Inference only reads backend tags, never tensor values.
template <class... Args>
const Backend& get_framework(const Backend* f, const Args&... args) {
  if (f) return *f;
  if (const Backend* global = detail::DispatchContext::instance().top()) return *global;
  detail::TagScan scan;
  (scan.visit(args), ...);
  if (scan.mixed) throw AmbiguousBackendError("arguments come from more than one backend; pass f explicitly");
  if (!scan.found) throw NoBackendError("no explicit backend, no global backend and no tensor arguments");
  return *scan.found;
}

}  // namespace templar
