#pragma once

// Reverse-mode autodiff backend. Ops record onto the calling thread's tape
// while execute_with_gradients runs; gradients are accumulated in float64 and
// cast back to each variable's dtype.

#include <atomic>
#include <optional>

#include "templar/backends/array_backend.hpp"

namespace templar::backends {

namespace autograd {

struct TapeNode {
  std::string_view op;
  std::vector<std::int64_t> parents;  // -1 for inputs not on the tape
  std::vector<Array> inputs;
  std::vector<Array> outputs;
  OpDef::Backward backward;  // empty: no gradient rule
  bool leaf = false;
};

inline std::uint64_t next_tape_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

inline std::uint64_t next_variable_id() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

class Tape {
 public:
  Tape() : id_(next_tape_id()) {}

  std::uint64_t id() const noexcept { return id_; }
  std::vector<TapeNode>& nodes() noexcept { return nodes_; }

  std::int64_t push(TapeNode node) {
    nodes_.push_back(std::move(node));
    return static_cast<std::int64_t>(nodes_.size()) - 1;
  }

  // Node id of t if it was recorded on this tape.
  std::optional<std::int64_t> node_of(const Tensor& t) const {
    if (t.grad_tag().tape_id == id_ && t.grad_tag().node >= 0) return t.grad_tag().node;
    return std::nullopt;
  }

 private:
  std::uint64_t id_;
  std::vector<TapeNode> nodes_;
};

inline thread_local Tape* active_tape = nullptr;

class ActiveTape {
 public:
  explicit ActiveTape(Tape& t) : prev_(active_tape) { active_tape = &t; }
  ~ActiveTape() { active_tape = prev_; }
  ActiveTape(const ActiveTape&) = delete;
  ActiveTape& operator=(const ActiveTape&) = delete;

 private:
  Tape* prev_;
};

}  // namespace autograd

class AutodiffBackend final : public ArrayBackend {
 public:
  std::string_view id() const override { return "autodiff"; }

  Variable variable(const Tensor& x) const override {
    if (&x.backend() != this) {
      throw WrongBackendError("variable() needs an autodiff tensor, got one from backend '" +
                              std::string(x.backend_id()) + "'");
    }
    if (!is_floating(x.dtype())) {
      throw InvalidDType("variables must be floating point, got " + std::string(dtype_name(x.dtype())));
    }
    return {Tensor(this, x.array()), autograd::next_variable_id()};
  }

  // fn receives one tracked tensor per variable and returns {loss, aux...}.
  GradientResult execute_with_gradients(const LossFn& fn, std::span<const Variable> vars) const override {
    autograd::Tape tape;
    std::vector<Tensor> leaves;
    leaves.reserve(vars.size());
    for (const Variable& v : vars) {
      const auto node = tape.push({"variable", {}, {}, {}, {}, true});
      leaves.emplace_back(this, v.value.array(), GradTag{tape.id(), node});
    }
    std::vector<Tensor> outputs;
    {
      autograd::ActiveTape scope(tape);
      outputs = fn(leaves);
    }
    if (outputs.empty() || !outputs.front().defined()) throw InvalidLossError("fn returned no loss");
    const Tensor& loss = outputs.front();
    if (loss.numel() != 1 || !is_floating(loss.dtype())) {
      throw InvalidLossError("loss must be a floating scalar, got shape " + loss.shape().str() + " " +
                             std::string(dtype_name(loss.dtype())));
    }

    auto& nodes = tape.nodes();
    std::vector<std::optional<Array>> adj(nodes.size());
    if (auto root = tape.node_of(loss)) {
      adj[static_cast<std::size_t>(*root)] = kernels::full(loss.shape(), DType::float64, 1.0);
      for (auto i = static_cast<std::int64_t>(*root); i >= 0; --i) {
        auto& g = adj[static_cast<std::size_t>(i)];
        const auto& node = nodes[static_cast<std::size_t>(i)];
        if (!g || node.leaf) continue;
        if (!node.backward) throw NoGradRuleError("op '" + std::string(node.op) + "' has no gradient rule");
        const auto gin = node.backward(node.inputs, node.outputs, *g);
        for (std::size_t j = 0; j < node.parents.size(); ++j) {
          const auto p = node.parents[j];
          if (p < 0) continue;
          auto& slot = adj[static_cast<std::size_t>(p)];
          if (!slot) {
            slot = gin[j];
          } else {
            slot = kernels::binary(kernels::BinaryOp::add, *slot, gin[j], slot->shape());
          }
        }
        g.reset();
      }
    }

    GradientResult result;
    result.loss = Tensor(this, loss.array());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& a = adj[static_cast<std::size_t>(leaves[i].grad_tag().node)];
      const DType dt = vars[i].value.dtype();
      result.grads.emplace_back(this, a ? kernels::cast(*a, dt) : Array(vars[i].value.shape(), dt));
    }
    for (std::size_t i = 1; i < outputs.size(); ++i) {
      result.aux.push_back(outputs[i].defined() ? Tensor(this, outputs[i].array()) : Tensor());
    }
    return result;
  }

  // value - lr * grad, as a new sequence; variable ids are kept.
  std::vector<Variable> gradient_descent_update(std::span<const Variable> vars, std::span<const Tensor> grads,
                                                double lr) const override {
    if (vars.size() != grads.size()) {
      throw InvalidArgument("gradient_descent_update: " + std::to_string(vars.size()) + " variables but " +
                            std::to_string(grads.size()) + " gradients");
    }
    if (!(lr >= 0.0)) throw InvalidArgument("learning rate must be non-negative");
    std::vector<Variable> out;
    out.reserve(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const Tensor& v = vars[i].value;
      if (v.shape() != grads[i].shape()) {
        throw InvalidArgument("gradient shape " + grads[i].shape().str() + " does not match variable " +
                              v.shape().str());
      }
      const Tensor step = mul(cast(grads[i], dtype_name(v.dtype())), full(Shape{}, lr, v.dtype()));
      out.push_back({sub(v, step), vars[i].id});
    }
    return out;
  }

 protected:
  std::vector<Tensor> wrap(const OpDef& def, std::span<const Tensor> inputs, std::span<const Array> in,
                           std::vector<Array> out) const override {
    std::vector<Tensor> t;
    t.reserve(out.size());
    autograd::Tape* tape = autograd::active_tape;
    std::vector<std::int64_t> parents;
    bool tracked = false;
    if (tape) {
      parents.reserve(inputs.size());
      for (const Tensor& x : inputs) {
        const auto n = tape->node_of(x);
        parents.push_back(n.value_or(-1));
        tracked = tracked || n.has_value();
      }
    }
    if (!tracked) {
      for (auto& a : out) t.emplace_back(this, std::move(a));
      return t;
    }
    const bool has_rule = static_cast<bool>(def.backward) && out.size() == 1;
    const std::vector<Array> saved_in(in.begin(), in.end());
    const std::vector<Array> saved_out = out;
    for (auto& a : out) {
      // Integer and bool results carry no gradient.
      if (!is_floating(a.dtype())) {
        t.emplace_back(this, std::move(a));
        continue;
      }
      autograd::TapeNode node{def.name, parents, saved_in, saved_out, has_rule ? def.backward : OpDef::Backward{}, false};
      const auto id = tape->push(std::move(node));
      t.emplace_back(this, std::move(a), GradTag{tape->id(), id});
    }
    return t;
  }
};

}  // namespace templar::backends

namespace templar {

inline const Backend& autodiff_backend() {
  static const backends::AutodiffBackend instance;
  return instance;
}

}  // namespace templar
