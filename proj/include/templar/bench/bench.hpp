#pragma once

// Per-op overhead profiler. Each op runs on a fixed fixture; every repeat is
// split into the three code groups using the GroupTimer boundaries. Replay mode
// traces the fixture once with compile_fn and times only the replays.

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "templar/graph/capture.hpp"
#include "templar/ops.hpp"

namespace templar::bench {

enum class Mode { eager, replay };

inline std::string_view mode_name(Mode m) { return m == Mode::eager ? "eager" : "replay"; }

inline Mode parse_mode(std::string_view s) {
  if (s == "eager") return Mode::eager;
  if (s == "replay") return Mode::replay;
  throw InvalidArgument("unknown bench mode '" + std::string(s) + "' (eager|replay)");
}

struct OpTiming {
  std::string op;
  std::string backend;
  Mode mode = Mode::eager;
  std::int64_t repeats = 0;
  std::int64_t warmup = 0;
  std::array<std::vector<std::int64_t>, 3> samples;  // per group, one entry per repeat
  std::vector<std::int64_t> totals;

  static std::int64_t percentile(std::vector<std::int64_t> v, double p) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    const auto rank = static_cast<std::size_t>(p * static_cast<double>(v.size() - 1) + 0.5);
    return v[std::min(rank, v.size() - 1)];
  }

  std::int64_t median(CodeGroup g) const { return percentile(samples[static_cast<std::size_t>(g)], 0.5); }
  std::int64_t p10(CodeGroup g) const { return percentile(samples[static_cast<std::size_t>(g)], 0.1); }
  std::int64_t p90(CodeGroup g) const { return percentile(samples[static_cast<std::size_t>(g)], 0.9); }
  std::int64_t median_total() const { return percentile(totals, 0.5); }

  // 1 - backend-only baseline / full op, on medians.
  double overhead_fraction() const {
    const auto full = median_total();
    return full > 0 ? 1.0 - static_cast<double>(median(CodeGroup::backend)) / static_cast<double>(full) : 0.0;
  }
};

// A benchmarked op: inputs built once, fn applies the op through backend b.
struct Fixture {
  std::string description;
  std::function<std::vector<Tensor>(const Backend&)> inputs;
  std::function<std::vector<Tensor>(const Backend&, std::span<const Tensor>)> fn;
};

// Fixtures default to 10^4-element float32 tensors ([100, 100] or [10000]).
// inv uses [100, 100]; svd uses [32, 32] to keep one-sided Jacobi affordable.
inline const std::map<std::string, Fixture, std::less<>>& fixtures() {
  static const auto table = [] {
    using V = std::vector<Tensor>;
    using S = std::span<const Tensor>;
    std::map<std::string, Fixture, std::less<>> t;
    auto rnd = [](const Backend& b, Shape s, double lo = -1.0, double hi = 1.0, std::uint64_t seed = 1) {
      return b.random_uniform(lo, hi, s, seed);
    };
    auto unary = [&](const char* name, std::function<Tensor(const Backend&, const Tensor&)> op, double lo = -1.0) {
      t[name] = {"x [100,100]",
                 [rnd, lo](const Backend& b) { return V{rnd(b, Shape{100, 100}, lo, 1.0)}; },
                 [op](const Backend& b, S in) { return V{op(b, in[0])}; }};
    };
    auto binary = [&](const char* name, std::function<Tensor(const Backend&, const Tensor&, const Tensor&)> op,
                      double lo = -1.0) {
      t[name] = {"a, b [100,100]",
                 [rnd, lo](const Backend& b) { return V{rnd(b, Shape{100, 100}, lo, 1.0, 1), rnd(b, Shape{100, 100}, lo, 1.0, 2)}; },
                 [op](const Backend& b, S in) { return V{op(b, in[0], in[1])}; }};
    };
    auto none = [](const Backend&) { return V{}; };

    t["zeros"] = {"shape [100,100]", none, [](const Backend& b, S) { return V{b.zeros(Shape{100, 100})}; }};
    t["ones"] = {"shape [100,100]", none, [](const Backend& b, S) { return V{b.ones(Shape{100, 100})}; }};
    t["full"] = {"shape [100,100]", none, [](const Backend& b, S) { return V{b.full(Shape{100, 100}, 0.5)}; }};
    t["array"] = {"nested host list [100,100]", none, [](const Backend& b, S) {
                    static const HostValue v = [] {
                      HostValue::List rows;
                      for (int i = 0; i < 100; ++i) {
                        HostValue::List row;
                        for (int j = 0; j < 100; ++j) row.emplace_back(0.01 * (i + j));
                        rows.emplace_back(std::move(row));
                      }
                      return HostValue(std::move(rows));
                    }();
                    return V{b.array(v)};
                  }};
    t["linspace"] = {"num 10000", none, [](const Backend& b, S) { return V{b.linspace(0.0, 1.0, 10000)}; }};
    t["random_uniform"] = {"shape [100,100]", none,
                           [](const Backend& b, S) { return V{b.random_uniform(0.0, 1.0, Shape{100, 100}, 3)}; }};
    unary("cast", [](const Backend& b, const Tensor& x) { return b.cast(x, "float64"); });
    unary("reshape", [](const Backend& b, const Tensor& x) { return b.reshape(x, {-1}); });
    unary("transpose", [](const Backend& b, const Tensor& x) { return b.transpose(x); });
    unary("expand_dims", [](const Backend& b, const Tensor& x) { return b.expand_dims(x, -1); });
    binary("concatenate", [](const Backend& b, const Tensor& x, const Tensor& y) {
      const Tensor xs[] = {x, y};
      return b.concatenate(xs, -1);
    });
    unary("tile", [](const Backend& b, const Tensor& x) { return b.tile(x, {1, 2}); });
    unary("slice", [](const Backend& b, const Tensor& x) { return b.slice(x, -1, 10, 90); });
    unary("sin", [](const Backend& b, const Tensor& x) { return b.sin(x); });
    unary("cos", [](const Backend& b, const Tensor& x) { return b.cos(x); });
    unary("tanh", [](const Backend& b, const Tensor& x) { return b.tanh(x); });
    unary("abs", [](const Backend& b, const Tensor& x) { return b.abs(x); });
    unary("sqrt", [](const Backend& b, const Tensor& x) { return b.sqrt(x); }, 0.0);
    unary("round", [](const Backend& b, const Tensor& x) { return b.round(x); });
    unary("floor", [](const Backend& b, const Tensor& x) { return b.floor(x); });
    unary("negative", [](const Backend& b, const Tensor& x) { return b.negative(x); });
    binary("add", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.add(x, y); });
    binary("sub", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.sub(x, y); });
    binary("mul", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.mul(x, y); });
    binary("div", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.div(x, y); }, 0.5);
    binary("pow", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.pow(x, y); }, 0.5);
    binary("maximum", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.maximum(x, y); });
    binary("minimum", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.minimum(x, y); });
    unary("clip", [](const Backend& b, const Tensor& x) { return b.clip(x, -0.5, 0.5); });
    unary("reduce_sum", [](const Backend& b, const Tensor& x) { return b.reduce_sum(x, -1); });
    unary("reduce_mean", [](const Backend& b, const Tensor& x) { return b.reduce_mean(x, -1); });
    unary("reduce_min", [](const Backend& b, const Tensor& x) { return b.reduce_min(x, -1, true); });
    unary("reduce_max", [](const Backend& b, const Tensor& x) { return b.reduce_max(x, -1, true); });
    t["gather_nd"] = {"params [10000,1], indices [10000,1]",
                      [rnd](const Backend& b) {
                        return V{rnd(b, Shape{10000, 1}),
                                 b.cast(b.floor(rnd(b, Shape{10000, 1}, 0.0, 10000.0, 4)), "int64")};
                      },
                      [](const Backend& b, S in) { return V{b.gather_nd(in[0], in[1])}; }};
    t["scatter_nd"] = {"indices [10000,1] into [10000], updates [10000]",
                       [rnd](const Backend& b) {
                         return V{b.cast(b.floor(rnd(b, Shape{10000, 1}, 0.0, 10000.0, 4)), "int64"),
                                  rnd(b, Shape{10000})};
                       },
                       [](const Backend& b, S in) { return V{b.scatter_nd(in[0], in[1], Shape{10000})}; }};
    binary("matmul", [](const Backend& b, const Tensor& x, const Tensor& y) { return b.matmul(x, y); });
    t["linear"] = {"x [100,100], w [100,100], b [100]",
                   [rnd](const Backend& b) {
                     return V{rnd(b, Shape{100, 100}, -1, 1, 1), rnd(b, Shape{100, 100}, -1, 1, 2), rnd(b, Shape{100}, -1, 1, 3)};
                   },
                   [](const Backend& b, S in) { return V{b.linear(in[0], in[1], in[2])}; }};
    t["inv"] = {"a [100,100], diagonally dominant",
                [rnd](const Backend& b) {
                  std::vector<double> eye(100 * 100, 0.0);
                  for (int i = 0; i < 100; ++i) eye[static_cast<std::size_t>(i * 101)] = 100.0;
                  return V{b.add(rnd(b, Shape{100, 100}), b.array(eye, Shape{100, 100}))};
                },
                [](const Backend& b, S in) { return V{b.inv(in[0])}; }};
    t["svd"] = {"x [32,32]", [rnd](const Backend& b) { return V{rnd(b, Shape{32, 32})}; },
                [](const Backend& b, S in) {
                  auto r = b.svd(in[0]);
                  return V{r.u, r.d, r.vt};
                }};
    return t;
  }();
  return table;
}

inline std::vector<std::string> all_ops() {
  std::vector<std::string> names;
  for (const auto& [k, v] : fixtures()) names.push_back(k);
  return names;
}

// "all" or a comma-separated list.
inline std::vector<std::string> parse_ops(std::string_view spec) {
  if (spec == "all") return all_ops();
  std::vector<std::string> out;
  std::stringstream ss{std::string(spec)};
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (name.empty()) continue;
    if (!fixtures().contains(name)) throw InvalidArgument("unknown or non-benchmarkable op '" + name + "'");
    out.push_back(name);
  }
  if (out.empty()) throw InvalidArgument("no ops selected");
  return out;
}

namespace detail {
inline std::mutex& bench_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// Group split per repeat: ivy_eager and ivy_compilable are timed at their
// boundaries; everything else inside the call counts as backend.
inline OpTiming time_op(const std::string& op, const Backend& b, Mode mode, std::int64_t repeats,
                        std::int64_t warmup) {
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  if (warmup < 0) throw InvalidArgument("warmup must be >= 0");
  auto it = fixtures().find(op);
  if (it == fixtures().end()) throw InvalidArgument("unknown or non-benchmarkable op '" + op + "'");
  const Fixture& fx = it->second;
  const std::vector<Tensor> inputs = fx.inputs(b);

  std::function<std::vector<Tensor>()> call;
  std::optional<graph::CompiledFn> compiled;
  if (mode == Mode::eager) {
    call = [&] { return fx.fn(b, inputs); };
  } else {
    compiled.emplace(graph::compile_fn([&](std::span<const Tensor> in) { return fx.fn(b, in); }, inputs));
    call = [&] { return (*compiled)(inputs); };
  }

  OpTiming t{op, std::string(b.id()), mode, repeats, warmup, {}, {}};
  for (std::int64_t i = 0; i < warmup; ++i) call();
  for (auto& s : t.samples) s.reserve(static_cast<std::size_t>(repeats));
  for (std::int64_t i = 0; i < repeats; ++i) {
    GroupTimer timer;
    std::int64_t total = 0;
    {
      ScopedTimer scope(timer);
      const auto start = templar::detail::Clock::now();
      auto out = call();
      total = templar::detail::elapsed_ns(start);
    }
    const auto eager_ns = timer.ns[static_cast<std::size_t>(CodeGroup::eager)];
    const auto comp_ns = timer.ns[static_cast<std::size_t>(CodeGroup::compilable)];
    t.samples[static_cast<std::size_t>(CodeGroup::backend)].push_back(std::max<std::int64_t>(0, total - eager_ns - comp_ns));
    t.samples[static_cast<std::size_t>(CodeGroup::compilable)].push_back(comp_ns);
    t.samples[static_cast<std::size_t>(CodeGroup::eager)].push_back(eager_ns);
    t.totals.push_back(total);
  }
  return t;
}

struct BenchOptions {
  std::vector<std::string> ops;
  std::int64_t repeats = 1000;
  std::int64_t warmup = 100;
  std::vector<Mode> modes{Mode::eager};
};

inline std::vector<OpTiming> run_bench(const BenchOptions& opt, const Backend& b) {
  std::unique_lock lock(detail::bench_mutex(), std::try_to_lock);
  if (!lock) throw StateError("a benchmark is already running in this process");
  std::vector<OpTiming> out;
  for (Mode m : opt.modes) {
    for (const auto& op : opt.ops) out.push_back(time_op(op, b, m, opt.repeats, opt.warmup));
  }
  return out;
}

// Median latency of resolving a backend with and without an explicit f.
struct DispatchLatency {
  double explicit_ns = 0;
  double inferred_ns = 0;
};

inline DispatchLatency dispatch_latency(const Backend& b, std::int64_t rounds = 200, std::int64_t batch = 1000) {
  const Tensor x = b.zeros(Shape{4});
  std::vector<double> ex, inf;
  volatile std::uintptr_t sink = 0;
  for (std::int64_t r = 0; r < rounds; ++r) {
    auto start = templar::detail::Clock::now();
    for (std::int64_t i = 0; i < batch; ++i) sink = sink + reinterpret_cast<std::uintptr_t>(&get_framework(&b, x));
    ex.push_back(static_cast<double>(templar::detail::elapsed_ns(start)) / static_cast<double>(batch));
    start = templar::detail::Clock::now();
    for (std::int64_t i = 0; i < batch; ++i) sink = sink + reinterpret_cast<std::uintptr_t>(&get_framework(nullptr, x));
    inf.push_back(static_cast<double>(templar::detail::elapsed_ns(start)) / static_cast<double>(batch));
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  return {median(ex), median(inf)};
}

// Long format: one row per (op, backend, mode, group).
inline nlohmann::json to_json(const std::vector<OpTiming>& timings) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : timings) {
    for (CodeGroup g : kAllCodeGroups) {
      rows.push_back({{"op", t.op},
                      {"backend", t.backend},
                      {"mode", mode_name(t.mode)},
                      {"group", code_group_name(g)},
                      {"median_ns", t.median(g)},
                      {"p10_ns", t.p10(g)},
                      {"p90_ns", t.p90(g)},
                      {"repeats", t.repeats}});
    }
  }
  return rows;
}

inline std::string to_csv(const std::vector<OpTiming>& timings) {
  std::ostringstream os;
  os << "op,backend,mode,group,median_ns,p10_ns,p90_ns,repeats\n";
  for (const auto& t : timings) {
    for (CodeGroup g : kAllCodeGroups) {
      os << t.op << ',' << t.backend << ',' << mode_name(t.mode) << ',' << code_group_name(g) << ',' << t.median(g)
         << ',' << t.p10(g) << ',' << t.p90(g) << ',' << t.repeats << '\n';
    }
  }
  return os.str();
}

inline std::string render_report(const std::vector<OpTiming>& timings, std::string_view format) {
  if (format == "csv") return to_csv(timings);
  if (format == "json") return to_json(timings).dump(2) + "\n";
  throw InvalidArgument("unknown report format '" + std::string(format) + "' (csv|json)");
}

inline void emit_report(const std::vector<OpTiming>& timings, std::string_view format, const std::string& path) {
  const std::string text = render_report(timings, format);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace templar::bench
