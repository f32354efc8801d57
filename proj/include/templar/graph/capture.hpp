#pragma once

// Trace-and-replay compilation. The first call runs fn eagerly while a
// CaptureSink records every graph-resident op (Backend::apply); the eager
// prologues are not recorded, so replay skips them entirely.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "templar/core/backend.hpp"

namespace templar::graph {

using Fn = std::function<std::vector<Tensor>(std::span<const Tensor>)>;

struct TensorSpec {
  Shape shape;
  DType dtype = DType::float32;

  friend bool operator==(const TensorSpec&, const TensorSpec&) = default;
};

class CapturedGraph {
 public:
  struct Record {
    const Backend* backend = nullptr;
    OpDef def;
    std::vector<std::size_t> args;  // value slots
    std::vector<std::size_t> outs;
  };

  // Structural view used to compare two captures.
  struct Node {
    std::string op;
    CodeGroup group;
    std::vector<std::size_t> args;
    std::vector<std::size_t> outs;
    friend bool operator==(const Node&, const Node&) = default;
  };

  const std::vector<TensorSpec>& signature() const noexcept { return signature_; }
  const std::vector<Record>& records() const noexcept { return records_; }
  std::size_t num_constants() const noexcept { return constants_.size(); }

  std::vector<Node> structure() const {
    std::vector<Node> nodes;
    for (const auto& r : records_) nodes.push_back({std::string(r.def.name), r.def.group, r.args, r.outs});
    return nodes;
  }

  std::vector<Tensor> replay(std::span<const Tensor> inputs) const {
    check_signature(inputs);
    std::vector<Tensor> values(num_slots_);
    for (std::size_t i = 0; i < inputs.size(); ++i) values[i] = inputs[i];
    for (const auto& [slot, t] : constants_) values[slot] = t;
    std::vector<Tensor> args;
    for (const auto& r : records_) {
      args.clear();
      for (auto s : r.args) args.push_back(values[s]);
      auto out = r.backend->apply(r.def, args);
      for (std::size_t j = 0; j < r.outs.size(); ++j) values[r.outs[j]] = std::move(out[j]);
    }
    std::vector<Tensor> result;
    result.reserve(outputs_.size());
    for (auto s : outputs_) result.push_back(values[s]);
    return result;
  }

  void check_signature(std::span<const Tensor> inputs) const {
    if (inputs.size() != signature_.size()) {
      throw SignatureMismatch("expected " + std::to_string(signature_.size()) + " inputs, got " +
                              std::to_string(inputs.size()));
    }
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      const TensorSpec got{inputs[i].shape(), inputs[i].dtype()};
      if (!(got == signature_[i])) {
        throw SignatureMismatch("input " + std::to_string(i) + ": captured " + signature_[i].shape.str() + " " +
                                std::string(dtype_name(signature_[i].dtype)) + ", got " + got.shape.str() + " " +
                                std::string(dtype_name(got.dtype)));
      }
    }
  }

 private:
  friend class Tracer;

  std::vector<TensorSpec> signature_;
  std::vector<Record> records_;
  std::vector<std::pair<std::size_t, Tensor>> constants_;
  std::vector<std::size_t> outputs_;
  std::size_t num_slots_ = 0;
};

// Records one run of fn into a CapturedGraph.
class Tracer final : public CaptureSink {
 public:
  static CapturedGraph trace(const Fn& fn, std::span<const Tensor> inputs) {
    Tracer tracer;
    auto& g = tracer.graph_;
    for (const Tensor& t : inputs) {
      g.signature_.push_back({t.shape(), t.dtype()});
      tracer.bind(t, /*dynamic=*/true);
    }
    std::vector<Tensor> outs;
    {
      Install guard(tracer);
      outs = fn(inputs);
    }
    for (const Tensor& t : outs) g.outputs_.push_back(tracer.slot_of(t));
    g.num_slots_ = tracer.dynamic_.size();
    return std::move(tracer.graph_);
  }

  void on_apply(const Backend& backend, const OpDef& def, std::span<const Tensor> inputs,
                std::span<const Tensor> outputs) override {
    CapturedGraph::Record r{&backend, def, {}, {}};
    bool dynamic = false;
    for (const Tensor& t : inputs) {
      const auto s = slot_of(t);
      r.args.push_back(s);
      dynamic = dynamic || dynamic_[s];
    }
    for (const Tensor& t : outputs) r.outs.push_back(bind(t, dynamic));
    graph_.records_.push_back(std::move(r));
  }

  // Reading a value that depends on the inputs would freeze a data-dependent
  // decision into the graph.
  void on_materialize(const Tensor& t) override {
    auto it = slots_.find(t.identity());
    if (it != slots_.end() && dynamic_[it->second]) {
      throw CaptureError("host materialization of an input-dependent tensor inside a captured function");
    }
  }

 private:
  struct Install {
    explicit Install(CaptureSink& s) : prev(templar::detail::active_capture) { templar::detail::active_capture = &s; }
    ~Install() { templar::detail::active_capture = prev; }
    CaptureSink* prev;
  };

  std::size_t bind(const Tensor& t, bool dynamic) {
    const std::size_t s = dynamic_.size();
    dynamic_.push_back(dynamic);
    slots_[t.identity()] = s;
    keep_.push_back(t);  // pins the address used as the key
    return s;
  }

  // Tensors not produced by a recorded op become constants of the graph.
  std::size_t slot_of(const Tensor& t) {
    if (auto it = slots_.find(t.identity()); it != slots_.end()) return it->second;
    const std::size_t s = bind(t, false);
    graph_.constants_.emplace_back(s, Tensor(&t.backend(), t.array()));
    return s;
  }

  CapturedGraph graph_;
  std::unordered_map<const void*, std::size_t> slots_;
  std::vector<bool> dynamic_;
  std::vector<Tensor> keep_;
};

// Callable returned by compile_fn. Thread-safe: the graph is immutable.
class CompiledFn {
 public:
  explicit CompiledFn(std::shared_ptr<const CapturedGraph> g) : graph_(std::move(g)) {}

  std::vector<Tensor> operator()(std::span<const Tensor> inputs) const { return graph_->replay(inputs); }
  std::vector<Tensor> operator()(std::initializer_list<Tensor> inputs) const {
    return graph_->replay(std::span<const Tensor>(inputs.begin(), inputs.size()));
  }

  const CapturedGraph& graph() const noexcept { return *graph_; }

 private:
  std::shared_ptr<const CapturedGraph> graph_;
};

// Traces fn on example_inputs. Shapes and dtypes are frozen; later calls must
// match them.
inline CompiledFn compile_fn(const Fn& fn, std::span<const Tensor> example_inputs) {
  return CompiledFn(std::make_shared<const CapturedGraph>(Tracer::trace(fn, example_inputs)));
}

inline CompiledFn compile_fn(const Fn& fn, std::initializer_list<Tensor> example_inputs) {
  return compile_fn(fn, std::span<const Tensor>(example_inputs.begin(), example_inputs.size()));
}

}  // namespace templar::graph
