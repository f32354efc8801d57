#include <Eigen/Geometry>
#include <cmath>
#include <numbers>

#include "oracles/common.hpp"
#include "support.hpp"
#include "templar/mech/pose.hpp"

using namespace templar;
using namespace templar::testing;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::Matrix3d rot_of(const std::vector<double>& m, std::size_t offset = 0) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) r(i, j) = m[offset + 4 * static_cast<std::size_t>(i) + static_cast<std::size_t>(j)];
  }
  return r;
}

}  // namespace

TEST(PlrToCart, Pole) {
  EXPECT_EQ(vals(mech::plr_to_cart(make(host(), {0, 0, 2}, {3}))), (std::vector<double>{0, 0, 2}));
}

TEST(PlrToCart, Equator) {
  expect_near_all(vals(mech::plr_to_cart(make(host(), {0, kPi / 2, 1}, {3}))), {1, 0, 0}, 1e-7);
}

TEST(PlrToCart, BatchRowsAreIndependent) {
  const Tensor batch = make(host(), {0.1, 0.2, 1.0, 0.3, 0.4, 2.0, 0.5, 0.6, 3.0, 0.7, 0.8, 4.0, 0.9, 1.0, 5.0, 1.1, 1.2, 6.0},
                            {2, 3, 3});
  const Tensor out = mech::plr_to_cart(batch);
  ASSERT_EQ(out.shape(), Shape({2, 3, 3}));
  const auto all = vals(out);
  const auto b = vals(batch);
  for (std::size_t row = 0; row < 6; ++row) {
    const Tensor one = mech::plr_to_cart(make(host(), {b[3 * row], b[3 * row + 1], b[3 * row + 2]}, {3}));
    EXPECT_EQ(vals(one), (std::vector<double>(all.begin() + 3 * row, all.begin() + 3 * row + 3)));
  }
}

TEST(PlrToCart, NormIsRadius) {
  oracle::Rng rng(31);
  const Array a = oracle::random_array(rng, Shape{500, 3}, -10, 10);
  const auto in = a.to_doubles();
  const auto out = vals(mech::plr_to_cart(host().array(in, a.shape(), DType::float64)));
  for (std::size_t i = 0; i < 500; ++i) {
    const double n = std::hypot(out[3 * i], out[3 * i + 1], out[3 * i + 2]);
    EXPECT_NEAR(n, std::abs(in[3 * i + 2]), 1e-7);
  }
}

TEST(PlrToCart, WrongTrailingExtent) {
  EXPECT_THROW(mech::plr_to_cart(make(host(), {1, 2}, {2})), InvalidArgument);
}

TEST(RotVecPose, IdentityRotation) {
  expect_near_all(vals(mech::rot_vec_pose_to_mat_pose(make(host(), {1, 2, 3, 0, 0, 0}, {6}))),
                  {1, 0, 0, 1, 0, 1, 0, 2, 0, 0, 1, 3}, 0);
}

TEST(RotVecPose, QuarterTurnAboutZ) {
  const auto m = vals(mech::rot_vec_pose_to_mat_pose(make(host(), {0, 0, 0, 0, 0, kPi / 2}, {6})));
  expect_near_all(m, {0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0}, 1e-7);
}

TEST(RotVecPose, MatchesQuaternionOracle) {
  oracle::Rng rng(32);
  const Array poses = oracle::random_array(rng, Shape{400, 6}, -3, 3);
  const auto p = poses.to_doubles();
  const Tensor out = mech::rot_vec_pose_to_mat_pose(host().array(p, poses.shape(), DType::float64));
  ASSERT_EQ(out.shape(), Shape({400, 3, 4}));
  const auto m = vals(out);
  for (std::size_t i = 0; i < 400; ++i) {
    const Eigen::Vector3d v(p[6 * i + 3], p[6 * i + 4], p[6 * i + 5]);
    const Eigen::Quaterniond q(Eigen::AngleAxisd(v.norm(), v.normalized()));
    const Eigen::Matrix3d r = rot_of(m, 12 * i);
    EXPECT_LT((r - q.toRotationMatrix()).cwiseAbs().maxCoeff(), 1e-6) << i;
    EXPECT_LT((r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-6);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(m[12 * i + 4 * k + 3], p[6 * i + k]);
  }
}

TEST(RotVecPose, SmallAnglesAreFirstOrder) {
  for (double a : {0.0, 1e-12, 1e-9, 1e-7}) {
    const auto m = vals(mech::rot_vec_pose_to_mat_pose(make(host(), {0, 0, 0, a, 0, 0}, {6})));
    // I + skew(v) up to O(a^2)
    expect_near_all(m, {1, 0, 0, 0, 0, 1, -a, 0, 0, a, 1, 0}, 1e-13);
  }
}

TEST(RotVecPose, ArbitraryBatchDims) {
  const Tensor x = host().zeros(Shape{2, 3, 4, 6}, DType::float64);
  EXPECT_EQ(mech::rot_vec_pose_to_mat_pose(x).shape(), Shape({2, 3, 4, 3, 4}));
  EXPECT_THROW(mech::rot_vec_pose_to_mat_pose(host().zeros(Shape{2, 5}, DType::float64)), InvalidArgument);
}
