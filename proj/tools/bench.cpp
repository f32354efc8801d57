// bench ops: per-op code-group timings, written as CSV or JSON.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "templar/bench/bench.hpp"

using namespace templar;

int main(int argc, char** argv) {
  CLI::App app{"templar overhead profiler"};
  app.require_subcommand(1);
  auto* ops = app.add_subcommand("ops", "time core ops split into backend / ivy_compilable / ivy_eager");
  std::string op_list = "all", backend = "host", mode = "eager", format = "csv", out;
  bench::BenchOptions opt;
  ops->add_option("--ops", op_list, "all | comma-separated op names")->capture_default_str();
  ops->add_option("--repeats", opt.repeats, "timed repeats per op")->capture_default_str();
  ops->add_option("--warmup", opt.warmup, "untimed warmup calls")->capture_default_str();
  ops->add_option("--backend", backend, "host|autodiff")->capture_default_str();
  ops->add_option("--mode", mode, "eager|replay")->capture_default_str();
  ops->add_option("--format", format, "csv|json")->capture_default_str();
  ops->add_option("--out", out, "report path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const Backend& f = backend_by_id(backend);
    opt.ops = bench::parse_ops(op_list);
    opt.modes = {bench::parse_mode(mode)};
    const std::string text_check = bench::render_report({}, format);  // validates the format up front
    (void)text_check;
    const auto timings = bench::run_bench(opt, f);
    if (out.empty()) {
      std::fputs(bench::render_report(timings, format).c_str(), stdout);
    } else {
      bench::emit_report(timings, format, out);
    }
    std::fprintf(stderr, "%-16s %12s %12s %12s %10s\n", "op", "backend_ns", "compilable_ns", "eager_ns", "overhead");
    for (const auto& t : timings) {
      std::fprintf(stderr, "%-16s %12lld %12lld %12lld %9.2f%%\n", t.op.c_str(),
                   static_cast<long long>(t.median(CodeGroup::backend)),
                   static_cast<long long>(t.median(CodeGroup::compilable)),
                   static_cast<long long>(t.median(CodeGroup::eager)), 100.0 * t.overhead_fraction());
    }
    const auto d = bench::dispatch_latency(f);
    std::fprintf(stderr, "dispatch: explicit f %.1f ns, inferred %.1f ns\n", d.explicit_ns, d.inferred_ns);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
