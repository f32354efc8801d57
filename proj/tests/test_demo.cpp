#include <cmath>
#include <fstream>

#include "support.hpp"
#include "templar/demo/fit_fc.hpp"
#include "templar/demo/plan.hpp"
#include "templar/demo/report.hpp"
#include "templar/demo/scene.hpp"
#include "templar/demo/swing_up.hpp"

using namespace templar;
using namespace templar::testing;

namespace {

const std::string kScene = std::string(TEMPLAR_SOURCE_DIR) + "/scenes/appendix_c.json";

nlohmann::json scene_json() {
  std::ifstream in(kScene);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST(Scene, BundledSceneParses) {
  const auto s = demo::load_scene(kScene);
  EXPECT_EQ(s.cuboids.size(), 4u);
  EXPECT_EQ(s.rel_body_points.size(), 5u);
  EXPECT_DOUBLE_EQ(s.start_pose[0], -1.15);
  EXPECT_DOUBLE_EQ(s.goal_pose[1], 1.125);
}

TEST(Scene, ParseErrors) {
  EXPECT_THROW(demo::load_scene("/nonexistent/scene.json"), IoError);
  auto j = scene_json();
  j.erase("goal_pose");
  EXPECT_THROW(demo::parse_scene(j), InvalidArgument);
  j = scene_json();
  j["start_pose"] = {1, 2, 3};
  EXPECT_THROW(demo::parse_scene(j), InvalidArgument);
  j = scene_json();
  j["cuboids"][0]["dims"][1] = -0.1;
  EXPECT_THROW(demo::parse_scene(j), InvalidArgument);
  j = scene_json();
  j["cuboids"][0]["ext_mat"].erase(2);
  EXPECT_THROW(demo::parse_scene(j), InvalidArgument);
  j = scene_json();
  j["rel_body_points"][0] = {1, "x", 2};
  EXPECT_THROW(demo::parse_scene(j), InvalidArgument);
}

TEST(Plan, ConvergesOnTheBundledScene) {
  const auto r = demo::run_plan(demo::load_scene(kScene), {}, ad());
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations_used, 1000);
  EXPECT_EQ(r.iterations.size(), static_cast<std::size_t>(r.iterations_used));
  EXPECT_GE(r.iterations.back().min_sdf, 0.1);
  for (std::size_t i = 0; i + 1 < r.iterations.size(); ++i) EXPECT_LT(r.iterations[i].min_sdf, 0.1);
  ASSERT_EQ(r.poses.list().size(), 100u);
  ASSERT_EQ(r.body_positions.list().size(), 100u);
  EXPECT_EQ(r.body_positions.list()[0].list().size(), 5u);
}

TEST(Plan, EndpointsStayFixedAtEveryIteration) {
  const auto scene = demo::load_scene(kScene);
  demo::PlanOptions opt;
  int seen = 0;
  opt.on_iteration = [&](const demo::PlanIteration&, const HostValue& poses) {
    const auto& rows = poses.list();
    const auto first = rows.front().flatten(), last = rows.back().flatten();
    for (std::size_t k = 0; k < 6; ++k) {
      EXPECT_NEAR(first[k], scene.start_pose[k], 1e-6);
      EXPECT_NEAR(last[k], scene.goal_pose[k], 1e-6);
    }
    ++seen;
  };
  const auto r = demo::run_plan(scene, opt, ad());
  EXPECT_EQ(seen, r.iterations_used);
}

TEST(Plan, EmptySceneConvergesImmediately) {
  auto s = demo::load_scene(kScene);
  s.cuboids.clear();
  const auto r = demo::run_plan(s, {}, ad());
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations_used, 1);
}

TEST(Plan, IterationCapAndReproducibility) {
  demo::PlanOptions opt;
  opt.max_iters = 3;
  const auto scene = demo::load_scene(kScene);
  const auto a = demo::run_plan(scene, opt, ad());
  EXPECT_FALSE(a.converged);
  EXPECT_EQ(a.iterations_used, 3);
  const auto b = demo::run_plan(scene, opt, ad());
  EXPECT_EQ(demo::to_json(a).dump(), demo::to_json(b).dump());
}

TEST(Plan, HostBackendIsUnsupported) {
  EXPECT_THROW(demo::run_plan(demo::load_scene(kScene), {}, host()), UnsupportedError);
}

TEST(Plan, ReportJson) {
  demo::PlanOptions opt;
  opt.max_iters = 2;
  const auto j = demo::to_json(demo::run_plan(demo::load_scene(kScene), opt, ad()));
  for (const char* k : {"iterations", "poses", "body_positions", "converged"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["iterations"].size(), 2u);
  EXPECT_TRUE(j["iterations"][0].contains("cost"));
  EXPECT_TRUE(j["iterations"][0].contains("min_sdf"));
  EXPECT_FALSE(j["converged"].get<bool>());
  EXPECT_EQ(nlohmann::json::parse(j.dump()), j);
}

TEST(FitFc, DefaultsDecreaseForEverySeed) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto l = demo::run_fit_fc({.seed = seed}, ad());
    ASSERT_EQ(l.size(), 100u);
    for (std::size_t i = 1; i < l.size(); ++i) EXPECT_LE(l[i], l[i - 1]) << "seed " << seed;
    EXPECT_LT(l.back(), l.front()) << "seed " << seed;
  }
}

TEST(FitFc, ZeroLearningRateIsConstant) {
  const auto l = demo::run_fit_fc({.lr = 0.0}, ad());
  for (double v : l) EXPECT_EQ(v, l.front());
}

TEST(FitFc, SeedsChangeTheInitialization) {
  EXPECT_NE(demo::run_fit_fc({.iters = 1, .seed = 0}, ad()), demo::run_fit_fc({.iters = 1, .seed = 1}, ad()));
  EXPECT_EQ(demo::run_fit_fc({.iters = 5, .seed = 3}, ad()), demo::run_fit_fc({.iters = 5, .seed = 3}, ad()));
}

TEST(Pendulum, TraceAndImprovement) {
  const auto r = demo::run_pendulum({}, ad());
  EXPECT_EQ(r.rewards.size(), 200u);
  EXPECT_NEAR(r.baseline, r.rewards.front(), 1e-9);
  EXPECT_GE(r.improvement(), 0.2);
  const auto short_run = demo::run_pendulum({.iters = 7}, ad());
  EXPECT_EQ(short_run.rewards.size(), 7u);
  EXPECT_THROW(demo::run_pendulum({.horizon = 0}, ad()), InvalidArgument);
}
