#pragma once

// Drone motion planning by gradient descent on spline anchors. Each iteration
// samples the spline, converts poses to matrices, places the body points and
// scores path length plus a collision term from the scene SDF.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "templar/demo/scene.hpp"
#include "templar/mech/pose.hpp"
#include "templar/ops.hpp"
#include "templar/robot/rigid_mobile.hpp"
#include "templar/robot/spline.hpp"
#include "templar/vision/sdf.hpp"

namespace templar::demo {

struct PlanIteration {
  double cost = 0;
  double min_sdf = 0;
};

struct PlanOptions {
  double lr = 0.01;
  std::int64_t num_anchors = 2;
  std::int64_t num_samples = 100;
  double clearance = 0.1;
  std::int64_t max_iters = 1000;
  std::uint64_t seed = 0;  // the planner draws no random numbers
  DType dtype = DType::float32;
  // Called after every evaluated iteration with that iteration's poses [S, 6].
  std::function<void(const PlanIteration&, const HostValue&)> on_iteration;
};

struct PlanReport {
  std::vector<PlanIteration> iterations;
  HostValue poses;           // [S, 6] from the last evaluated iteration
  HostValue body_positions;  // [S, P, 3]
  bool converged = false;
  std::int64_t iterations_used = 0;
};

// Scene tensors on one backend.
struct PlanScene {
  Tensor ext_mats;  // [M, 3, 4]
  Tensor dims;      // [M, 3]
  Tensor start;     // [6]
  Tensor goal;      // [6]
  Tensor body;      // [P, 3]
  std::int64_t num_cuboids = 0;
};

inline PlanScene to_tensors(const SceneConfig& s, const Backend& b, DType dt) {
  PlanScene t;
  t.num_cuboids = static_cast<std::int64_t>(s.cuboids.size());
  std::vector<double> mats, dims, body;
  for (const auto& c : s.cuboids) {
    for (const auto& row : c.ext_mat) mats.insert(mats.end(), row.begin(), row.end());
    dims.insert(dims.end(), c.dims.begin(), c.dims.end());
  }
  for (const auto& p : s.rel_body_points) body.insert(body.end(), p.begin(), p.end());
  t.ext_mats = b.array(mats, Shape{t.num_cuboids, 3, 4}, dt);
  t.dims = b.array(dims, Shape{t.num_cuboids, 3}, dt);
  t.start = b.array(s.start_pose, Shape{6}, dt);
  t.goal = b.array(s.goal_pose, Shape{6}, dt);
  t.body = b.array(body, Shape{static_cast<std::int64_t>(s.rel_body_points.size()), 3}, dt);
  return t;
}

struct PlanCost {
  Tensor total;
  Tensor poses;           // [S, 6]
  Tensor body_positions;  // [S, P, 3]
  Tensor sdf_vals;        // [S * P, 1]; undefined for an empty scene
};

// Cost of the path through start, the learnable anchors [A, 6] and goal.
// As in the reference loop, the body positions are transposed to [P, S, 3]
// before compute_length, so its leading axis runs over body points.
inline PlanCost plan_cost(const Tensor& learnable, const Tensor& anchor_times, const Tensor& query_times,
                          const PlanScene& scene, const robot::RigidMobile& drone, const Backend& b) {
  const Tensor anchor_parts[] = {b.expand_dims(scene.start, 0), learnable, b.expand_dims(scene.goal, 0)};
  const Tensor anchor_vals = b.concatenate(anchor_parts, 0);
  const Tensor poses = robot::sample_spline_path(anchor_times, anchor_vals, query_times, &b);
  const Tensor mats = mech::rot_vec_pose_to_mat_pose(poses, &b);
  const Tensor body_positions = drone.sample_body(mats);
  const Tensor length_cost = robot::compute_length(b.transpose(body_positions, Axes{1, 0, 2}), &b);
  if (scene.num_cuboids == 0) return {length_cost, poses, body_positions, Tensor()};
  const Tensor sdf_vals = vision::scene_sdf(scene.ext_mats, scene.dims, b.reshape(body_positions, {-1, 3}), &b);
  const Tensor coll_cost = b.negative(b.reduce_mean(sdf_vals));
  const Tensor total = b.add(length_cost, b.mul(coll_cost, b.full(Shape{}, 10.0, coll_cost.dtype())));
  return {total, poses, body_positions, sdf_vals};
}

// Stops at the first iteration whose min SDF reaches the clearance; an empty
// scene is clear at once (min SDF +inf).
inline PlanReport run_plan(const SceneConfig& config, const PlanOptions& opt, const Backend& b) {
  if (opt.num_anchors < 1) throw InvalidArgument("plan: num_anchors must be >= 1");
  if (opt.num_samples < 2) throw InvalidArgument("plan: num_samples must be >= 2");
  if (opt.max_iters < 1) throw InvalidArgument("plan: max_iters must be >= 1");
  const DType dt = opt.dtype;
  const std::string dt_name(dtype_name(dt));
  const PlanScene scene = to_tensors(config, b, dt);
  const robot::RigidMobile drone(scene.body, &b);

  const Tensor anchor_times = b.cast(b.expand_dims(b.linspace(0, 1, 2 + opt.num_anchors, DType::float64), -1), dt_name);
  const Tensor query_times = b.cast(b.expand_dims(b.linspace(0, 1, opt.num_samples, DType::float64), -1), dt_name);
  Variable anchors = b.variable(b.slice(b.linspace(scene.start, scene.goal, 2 + opt.num_anchors), 0, 1, opt.num_anchors + 1));

  PlanReport report;
  for (std::int64_t it = 0; it < opt.max_iters; ++it) {
    auto res = b.execute_with_gradients(
        [&](std::span<const Tensor> xs) {
          auto c = plan_cost(xs[0], anchor_times, query_times, scene, drone, b);
          return std::vector<Tensor>{c.total, c.poses, c.body_positions, c.sdf_vals};
        },
        std::span<const Variable>(&anchors, 1));
    const double cost = b.to_host(res.loss).flatten()[0];
    const double min_sdf = res.aux[2].defined() ? b.to_host(b.reduce_min(res.aux[2])).flatten()[0]
                                                : std::numeric_limits<double>::infinity();
    report.iterations.push_back({cost, min_sdf});
    report.poses = b.to_host(res.aux[0]);
    report.body_positions = b.to_host(res.aux[1]);
    report.iterations_used = it + 1;
    if (opt.on_iteration) opt.on_iteration(report.iterations.back(), report.poses);
    if (min_sdf >= opt.clearance) {
      report.converged = true;
      break;
    }
    anchors = b.gradient_descent_update(std::span<const Variable>(&anchors, 1), res.grads, opt.lr)[0];
  }
  return report;
}

}  // namespace templar::demo
