#pragma once

// Scene files: UTF-8 JSON with keys cuboids[].ext_mat (3x4), cuboids[].dims
// (3), start_pose (6), goal_pose (6), rel_body_points (Px3).

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "templar/core/error.hpp"

namespace templar::demo {

struct Cuboid {
  std::array<std::array<double, 4>, 3> ext_mat{};
  std::array<double, 3> dims{};
};

struct SceneConfig {
  std::vector<Cuboid> cuboids;
  std::array<double, 6> start_pose{};
  std::array<double, 6> goal_pose{};
  std::vector<std::array<double, 3>> rel_body_points;
};

namespace detail {

template <std::size_t N>
std::array<double, N> numbers(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != N) {
    throw InvalidArgument("scene: " + what + " must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw InvalidArgument("scene: " + what + " must contain numbers only");
    out[i] = j[i].get<double>();
    if (!std::isfinite(out[i])) throw InvalidArgument("scene: " + what + " must be finite");
  }
  return out;
}

inline const nlohmann::json& key(const nlohmann::json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw InvalidArgument(std::string("scene: missing key '") + name + "'");
  return j.at(name);
}

}  // namespace detail

inline SceneConfig parse_scene(const nlohmann::json& j) {
  SceneConfig s;
  const auto& cuboids = detail::key(j, "cuboids");
  if (!cuboids.is_array()) throw InvalidArgument("scene: cuboids must be an array");
  for (std::size_t c = 0; c < cuboids.size(); ++c) {
    const std::string at = "cuboids[" + std::to_string(c) + "]";
    Cuboid cub;
    const auto& rows = detail::key(cuboids[c], "ext_mat");
    if (!rows.is_array() || rows.size() != 3) throw InvalidArgument("scene: " + at + ".ext_mat must have 3 rows");
    for (std::size_t r = 0; r < 3; ++r) cub.ext_mat[r] = detail::numbers<4>(rows[r], at + ".ext_mat row");
    cub.dims = detail::numbers<3>(detail::key(cuboids[c], "dims"), at + ".dims");
    for (double d : cub.dims) {
      if (!(d > 0)) throw InvalidArgument("scene: " + at + ".dims must be positive");
    }
    s.cuboids.push_back(cub);
  }
  s.start_pose = detail::numbers<6>(detail::key(j, "start_pose"), "start_pose");
  s.goal_pose = detail::numbers<6>(detail::key(j, "goal_pose"), "goal_pose");
  const auto& pts = detail::key(j, "rel_body_points");
  if (!pts.is_array() || pts.empty()) throw InvalidArgument("scene: rel_body_points must be a non-empty array");
  for (const auto& p : pts) s.rel_body_points.push_back(detail::numbers<3>(p, "rel_body_points entry"));
  return s;
}

inline SceneConfig load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("scene file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_scene(j);
}

}  // namespace templar::demo
