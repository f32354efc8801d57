// demo plan | fit-fc | pendulum
// Exit codes: 0 success/converged, 2 plan not converged, 1 usage or config error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "templar/demo/fit_fc.hpp"
#include "templar/demo/plan.hpp"
#include "templar/demo/report.hpp"
#include "templar/demo/swing_up.hpp"

using namespace templar;

int main(int argc, char** argv) {
  CLI::App app{"templar demos: motion planning, FC-model fit, pendulum swing-up"};
  app.require_subcommand(1);

  std::string backend = "autodiff";

  auto* plan = app.add_subcommand("plan", "gradient-based drone motion planning in a cuboid scene");
  std::string scene_path, out_path, plot_path;
  demo::PlanOptions popt;
  plan->add_option("--scene", scene_path, "scene JSON file")->required();
  plan->add_option("--lr", popt.lr, "learning rate")->capture_default_str();
  plan->add_option("--anchors", popt.num_anchors, "learnable spline anchors")->capture_default_str();
  plan->add_option("--samples", popt.num_samples, "poses sampled along the path")->capture_default_str();
  plan->add_option("--clearance", popt.clearance, "required min SDF")->capture_default_str();
  plan->add_option("--max-iters", popt.max_iters, "iteration cap")->capture_default_str();
  plan->add_option("--seed", popt.seed, "accepted for uniformity; the planner is deterministic")->capture_default_str();
  plan->add_option("--backend", backend, "host|autodiff")->capture_default_str();
  plan->add_option("--out", out_path, "write the PlanReport JSON here");
  plan->add_option("--plot", plot_path, "write an SVG of cost and min SDF per iteration");

  auto* fit = app.add_subcommand("fit-fc", "fit the one-unit tanh model to 1 -> 1");
  demo::FitOptions fopt;
  fit->add_option("--lr", fopt.lr, "learning rate")->capture_default_str();
  fit->add_option("--iters", fopt.iters, "iterations")->capture_default_str();
  fit->add_option("--seed", fopt.seed, "weight init seed")->capture_default_str();
  fit->add_option("--backend", backend, "host|autodiff")->capture_default_str();

  auto* pend = app.add_subcommand("pendulum", "pendulum swing-up by gradient ascent on torques");
  demo::SwingUpOptions sopt;
  pend->add_option("--horizon", sopt.horizon, "steps per rollout")->capture_default_str();
  pend->add_option("--iters", sopt.iters, "gradient-ascent iterations")->capture_default_str();
  pend->add_option("--lr", sopt.lr, "learning rate")->capture_default_str();
  pend->add_option("--seed", sopt.seed, "accepted for uniformity; the start state is fixed")->capture_default_str();
  pend->add_option("--backend", backend, "host|autodiff")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    const Backend& f = backend_by_id(backend);
    if (*plan) {
      const auto scene = demo::load_scene(scene_path);
      const auto report = demo::run_plan(scene, popt, f);
      for (std::size_t i = 0; i < report.iterations.size(); ++i) {
        const auto& it = report.iterations[i];
        std::printf("iteration %zu, cost = %.6f, min_sdf - clearance = %.6f\n", i, it.cost, it.min_sdf - popt.clearance);
      }
      std::printf(report.converged ? "collision-free path found!\n" : "no collision-free path within %lld iterations\n",
                  static_cast<long long>(popt.max_iters));
      if (!out_path.empty()) demo::write_text(out_path, demo::to_json(report).dump(2) + "\n");
      if (!plot_path.empty()) demo::write_text(plot_path, demo::plot_svg(report, popt.clearance));
      return report.converged ? 0 : 2;
    }
    if (*fit) {
      const auto losses = demo::run_fit_fc(fopt, f);
      for (std::size_t i = 0; i < losses.size(); ++i) std::printf("iteration %zu, loss = %.9g\n", i, losses[i]);
      return 0;
    }
    if (*pend) {
      const auto r = demo::run_pendulum(sopt, f);
      for (std::size_t i = 0; i < r.rewards.size(); ++i) std::printf("iteration %zu, reward = %.6f\n", i, r.rewards[i]);
      std::printf("zero-torque reward = %.6f, final reward = %.6f, improvement = %.1f%%\n", r.baseline, r.final_reward,
                  100.0 * r.improvement());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
