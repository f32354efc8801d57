// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "oracles/dispatch.hpp"
#include "oracles/library.hpp"
#include "oracles/parity.hpp"
#include "templar/bench/bench.hpp"
#include "templar/demo/fit_fc.hpp"
#include "templar/demo/plan.hpp"
#include "templar/demo/swing_up.hpp"

using namespace templar;
using namespace templar::oracle;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

int failures = 0;

template <class Fn>
void criterion(int id, const char* title, Fn&& check) {
  Verdict v{false, ""};
  const auto start = std::chrono::steady_clock::now();
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("%s  %d  %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict suite_verdict(const std::vector<SuiteResult>& results, std::int64_t min_cases, double tol) {
  std::string bad;
  double worst = 0;
  std::string worst_op;
  for (const auto& r : results) {
    const bool ok = r.failure.empty() && r.cases >= min_cases && r.worst <= tol;
    if (!ok) bad += " " + r.name + (r.failure.empty() ? fmt("(%.3g)", r.worst) : "(threw: " + r.failure + ")");
    if (r.worst >= worst) {
      worst = r.worst;
      worst_op = r.name;
    }
  }
  if (!bad.empty()) return {false, "over tolerance:" + bad};
  return {true, std::to_string(results.size()) + " ops x " + std::to_string(min_cases) + " cases, worst " +
                    fmt("%.3g", worst) + " (" + worst_op + ")" + fmt(" <= %.0e", tol)};
}

}  // namespace

int main() {
  // The handler matrix needs an empty global stack.
  ::unsetenv("TEMPLAR_BACKEND");
  const Backend& ad = autodiff_backend();

  criterion(1, "motion planning on the bundled scene", [&]() -> Verdict {
    const auto scene = demo::load_scene(std::string(TEMPLAR_SOURCE_DIR) + "/scenes/appendix_c.json");
    const auto start = std::chrono::steady_clock::now();
    const auto report = demo::run_plan(scene, demo::PlanOptions{}, ad);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double min_sdf = report.iterations.back().min_sdf;
    const bool ok = report.converged && min_sdf >= 0.1 && report.iterations_used <= 1000 && secs < 60;
    return {ok, fmt("converged=%g min_sdf=%.4f after %g iterations", report.converged, min_sdf,
                    static_cast<double>(report.iterations_used)) +
                    fmt(" in %.2f s (limits: 1000 iterations, 60 s)", secs)};
  });

  criterion(2, "backward rules vs central differences", [] {
    return suite_verdict(run_grad_suite(50), 50, kGradTol);
  });

  criterion(3, "host vs autodiff parity", [] { return suite_verdict(run_parity_suite(100), 100, kParityTol); });

  criterion(4, "handler priority matrix", []() -> Verdict {
    const auto rows = handler_matrix();
    bool seen[8] = {};
    std::string bad;
    for (const auto& r : rows) {
      seen[r.has_explicit * 4 + r.has_stack * 2 + r.has_tensor] = true;
      if (!r.ok()) bad += " [" + r.describe() + "]";
    }
    for (bool s : seen) {
      if (!s) bad += " [missing combination]";
    }
    if (!mixed_backends_rejected()) bad += " [mixed backends not rejected]";
    if (framework_depth() != 0) bad += " [stack not balanced]";
    if (!bad.empty()) return {false, bad};
    return {true, std::to_string(rows.size()) + " rows over 8 combinations, mixed backends rejected"};
  });

  criterion(5, "trace/replay fidelity", [&]() -> Verdict {
    std::string bad;
    for (const auto& r : replay_fidelity(ad)) {
      if (!r.bitwise_equal) bad += " " + r.name + "(not bitwise equal)";
      if (r.replay_eager_entries != 0) bad += " " + r.name + "(eager work during replay)";
    }
    bench::BenchOptions opt{bench::all_ops(), 20, 2, {bench::Mode::replay}};
    std::int64_t eager_ns = 0;
    for (const auto& t : bench::run_bench(opt, ad)) {
      for (auto v : t.samples[static_cast<std::size_t>(CodeGroup::eager)]) eager_ns += v;
    }
    if (eager_ns != 0) bad += fmt(" bench replay ivy_eager total %g ns", static_cast<double>(eager_ns));
    if (!bad.empty()) return {false, bad};
    return {true, "4 functions replay bitwise; bench replay ivy_eager = 0 ns over " +
                      std::to_string(bench::all_ops().size()) + " ops"};
  });

  criterion(6, "library math oracles", [&]() -> Verdict {
    const Backend& h = host_backend();
    Rng rng(6);
    double interp = 0, rows = 0;
    for (int c = 0; c < 200; ++c) {
      const auto a = integer(rng, 2, 8), d = integer(rng, 1, 6);
      const auto t = gen::anchor_times(rng, a);
      const Tensor times = h.array(t, Shape{a, 1}, DType::float64);
      const Tensor values = h.array(random_array(rng, Shape{a, d}, -2, 2).to_doubles(), Shape{a, d}, DType::float64);
      const auto got = robot::sample_spline_path(times, values, times, &h).array().to_doubles();
      const auto want = values.array().to_doubles();
      for (std::size_t i = 0; i < got.size(); ++i) interp = std::max(interp, std::abs(got[i] - want[i]));
      std::vector<double> q(17);
      for (auto& v : q) v = uniform(rng, 0, 1);
      const auto basis = robot::natural_cubic_basis(t, q);
      for (std::size_t s = 0; s < q.size(); ++s) {
        double sum = 0;
        for (std::int64_t j = 0; j < a; ++j) sum += basis[s * static_cast<std::size_t>(a) + static_cast<std::size_t>(j)];
        rows = std::max(rows, std::abs(sum - 1));
      }
    }

    const auto bs = boxes(appendix_c_ext_mats(), appendix_c_dims());
    const Scene sc = appendix_c_scene(h);
    std::vector<double> pts;
    for (int i = 0; i < 10000; ++i) {
      pts.push_back(uniform(rng, -1.6, 1.6));
      pts.push_back(uniform(rng, -1.6, 1.6));
      pts.push_back(uniform(rng, -0.2, 1.7));
    }
    const auto sdf = vision::scene_sdf(sc.ext_mats, sc.dims, h.array(pts, Shape{10000, 3}, DType::float64), &h)
                         .array()
                         .to_doubles();
    std::int64_t sign_mismatch = 0, inside = 0, checked = 0;
    double magnitude = 0;
    for (std::size_t i = 0; i < sdf.size(); ++i) {
      const Eigen::Vector3d p(pts[3 * i], pts[3 * i + 1], pts[3 * i + 2]);
      const bool in = inside_any(bs, p);
      inside += in;
      if (in != (sdf[i] < 0)) ++sign_mismatch;
      if (!in && checked < 1000) {
        magnitude = std::max(magnitude, std::abs(sdf[i] - surface_distance(bs, p)));
        ++checked;
      }
    }

    double conservation = 0;
    for (int c = 0; c < 100; ++c) {
      const auto n = integer(rng, 1, 50), ch = integer(rng, 1, 4);
      const std::array<std::int64_t, 3> res{integer(rng, 1, 6), integer(rng, 1, 6), integer(rng, 1, 6)};
      const auto feats = random_array(rng, Shape{n, ch}, -1, 1).to_doubles();
      const auto grid = vision::coords_to_voxel_grid(h.array(random_array(rng, Shape{n, 3}, -3, 3).to_doubles(), Shape{n, 3}, DType::float64),
                                                     res, h.array(feats, Shape{n, ch}, DType::float64), std::nullopt, &h);
      const auto gf = grid.features.array().to_doubles();
      const auto gc = grid.counts.array().to_doubles();
      double want = 0, got = 0, count = 0;
      for (double v : feats) want += v;
      for (double v : gf) got += v;
      for (double v : gc) count += v;
      conservation = std::max({conservation, std::abs(got - want), std::abs(count - static_cast<double>(n))});
    }

    const bool ok = interp <= 1e-9 && rows <= 1e-9 && sign_mismatch == 0 && checked == 1000 && magnitude <= 2e-3 &&
                    conservation <= 1e-6;
    return {ok, fmt("spline at anchors %.2g, row sums %.2g (<= 1e-9); ", interp, rows) +
                    fmt("sign mismatches %g of 10000 (%g inside); ", static_cast<double>(sign_mismatch),
                        static_cast<double>(inside)) +
                    fmt("outside magnitude %.2g over %g points (<= 2e-3); voxel conservation %.2g (<= 1e-6)", magnitude,
                        static_cast<double>(checked), conservation)};
  });

  criterion(7, "FC model training over 10 seeds", [&]() -> Verdict {
    std::string bad;
    double worst_ratio = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      demo::FitOptions opt;
      opt.seed = seed;
      const auto trace = demo::run_fit_fc(opt, ad);
      bool monotone = true;
      for (std::size_t i = 1; i < trace.size(); ++i) monotone = monotone && trace[i] <= trace[i - 1];
      if (!monotone || !(trace.back() < trace.front())) bad += " seed " + std::to_string(seed);
      worst_ratio = std::max(worst_ratio, trace.back() / trace.front());
    }
    if (!bad.empty()) return {false, "loss increased or did not drop for" + bad};
    return {true, fmt("non-increasing, final/initial loss <= %.4f", worst_ratio)};
  });

  criterion(8, "pendulum swing-up improvement", [&]() -> Verdict {
    const auto r = demo::run_pendulum(demo::SwingUpOptions{}, ad);
    return {r.improvement() >= 0.2, fmt("baseline %.2f, after 200 updates %.2f, improvement %.1f%% (>= 20%%)",
                                        r.baseline, r.final_reward, 100 * r.improvement())};
  });

  std::printf("%s: %d of 8 criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
