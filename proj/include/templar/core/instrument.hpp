#pragma once

// Instrumentation shared by the backends, graph capture and the bench
// harness: code-group timing and the capture hook.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "templar/core/tensor.hpp"

namespace templar {

// Where an op's time goes: the wrapped backend computation, graph-resident
// fix-ups (reshapes/transposes added for unification), and host-side work
// that only runs eagerly (dtype lookups, axis/shape construction).
enum class CodeGroup : std::uint8_t { backend = 0, compilable = 1, eager = 2 };

inline constexpr std::array<CodeGroup, 3> kAllCodeGroups = {CodeGroup::backend, CodeGroup::compilable,
                                                            CodeGroup::eager};

inline constexpr std::string_view code_group_name(CodeGroup g) {
  switch (g) {
    case CodeGroup::backend: return "backend";
    case CodeGroup::compilable: return "ivy_compilable";
    case CodeGroup::eager: return "ivy_eager";
  }
  return "?";
}

// A graph-resident op: `forward` has every eager-derived attribute frozen in,
// so it can be replayed without re-running the eager prologue. `backward` maps
// (inputs, outputs, d loss / d output 0) to one float64 gradient per input;
// an empty backward means the op has no gradient rule.
struct OpDef {
  using Forward = std::function<std::vector<Array>(std::span<const Array>)>;
  using Backward =
      std::function<std::vector<Array>(std::span<const Array>, std::span<const Array>, const Array&)>;

  std::string_view name;
  CodeGroup group = CodeGroup::backend;
  Forward forward;
  Backward backward;
};

struct GroupTimer {
  std::array<std::int64_t, 3> ns{};
  std::int64_t eager_entries = 0;
  std::int64_t graph_ops = 0;

  void reset() { *this = GroupTimer{}; }
};

// Receives every graph-resident op executed on the thread while installed.
class CaptureSink {
 public:
  virtual ~CaptureSink() = default;
  virtual void on_apply(const Backend& backend, const OpDef& def, std::span<const Tensor> inputs,
                        std::span<const Tensor> outputs) = 0;
  // Host materialization of a tensor.
  virtual void on_materialize(const Tensor& t) = 0;
};

namespace detail {
inline thread_local GroupTimer* active_timer = nullptr;
inline thread_local CaptureSink* active_capture = nullptr;

using Clock = std::chrono::steady_clock;

inline std::int64_t elapsed_ns(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count();
}
}  // namespace detail

// Installs a timer for the current thread for the scope's lifetime.
class ScopedTimer {
 public:
  explicit ScopedTimer(GroupTimer& timer) : prev_(detail::active_timer) { detail::active_timer = &timer; }
  ~ScopedTimer() { detail::active_timer = prev_; }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  GroupTimer* prev_;
};

// Marks host-side eager work. Never entered when a captured graph replays.
class EagerScope {
 public:
  EagerScope() : timer_(detail::active_timer) {
    if (timer_) {
      ++timer_->eager_entries;
      start_ = detail::Clock::now();
    }
  }
  ~EagerScope() {
    if (timer_) timer_->ns[static_cast<std::size_t>(CodeGroup::eager)] += detail::elapsed_ns(start_);
  }
  EagerScope(const EagerScope&) = delete;
  EagerScope& operator=(const EagerScope&) = delete;

 private:
  GroupTimer* timer_;
  detail::Clock::time_point start_{};
};

// Runs fn under EagerScope and returns its result.
template <class Fn>
decltype(auto) eager(Fn&& fn) {
  EagerScope scope;
  return fn();
}

}  // namespace templar
