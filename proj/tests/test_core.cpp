#include <cmath>

#include "support.hpp"

using namespace templar;
using namespace templar::testing;

TEST(Creation, LinspaceIncludesEndpoints) {
  expect_near_all(vals(host().linspace(0, 1, 3)), {0.0, 0.5, 1.0}, 0);
  EXPECT_THROW(host().linspace(0, 1, 1), InvalidArgument);
}

TEST(Creation, LinspaceOfTensorsAddsLeadingAxis) {
  const Tensor s = make(host(), {-1.15, -1.028, 0.6, 0, 0, 0.6981}, {6});
  const Tensor t = make(host(), {1.025, 1.125, 0.6, 0, 0, 0.6981}, {6});
  const Tensor l = host().linspace(s, t, 4);
  EXPECT_EQ(l.shape(), Shape({4, 6}));
  const auto v = vals(l);
  EXPECT_NEAR(v[6], -1.15 + (1.025 + 1.15) / 3, 1e-12);
  EXPECT_NEAR(v[18], 1.025, 1e-12);
}

TEST(Creation, ZerosDefaultsToFloat32) {
  const Tensor z = host().zeros(Shape{2, 3});
  EXPECT_EQ(z.dtype(), DType::float32);
  EXPECT_EQ(z.shape(), Shape({2, 3}));
  for (double v : vals(z)) EXPECT_EQ(v, 0.0);
}

TEST(Cast, TruncatesTowardZero) {
  const Tensor x = make(host(), {1.7, -1.7}, {2});
  const Tensor i = host().cast(x, "int32");
  EXPECT_EQ(i.dtype(), DType::int32);
  expect_near_all(vals(i), {1, -1}, 0);
  const Tensor b = host().cast(make(host(), {1, 0}, {2}, DType::int32), "bool");
  EXPECT_EQ(b.dtype(), DType::boolean);
  EXPECT_EQ(host().to_host(b), HostValue({true, false}));
  EXPECT_THROW(host().cast(x, "float16"), InvalidDType);
}

TEST(Cast, IdentityKeepsValues) {
  const Tensor x = make(host(), {0.1, 2.5}, {2}, DType::float32);
  EXPECT_EQ(vals(host().cast(x, "float32")), vals(x));
}

TEST(DTypeTag, RoundTrips) {
  for (DType d : kAllDTypes) EXPECT_EQ(parse_dtype(dtype_name(d)), d);
}

TEST(ShapeOps, TransposeDefaultReverses) {
  const Tensor x = make(host(), {1, 2, 3, 4, 5, 6}, {2, 3});
  const Tensor t = host().transpose(x);
  EXPECT_EQ(t.shape(), Shape({3, 2}));
  expect_near_all(vals(t), {1, 4, 2, 5, 3, 6}, 0);
  EXPECT_THROW(host().transpose(x, Axes{0, 0}), InvalidArgument);
}

TEST(ShapeOps, ConcatenateAndTile) {
  const Tensor xs[] = {make(host(), {1}, {1}), make(host(), {2}, {1}), make(host(), {3}, {1})};
  expect_near_all(vals(host().concatenate(xs, -1)), {1, 2, 3}, 0);
  expect_near_all(vals(host().tile(make(host(), {1, 2}, {2}), {3})), {1, 2, 1, 2, 1, 2}, 0);
  const Tensor ragged[] = {make(host(), {1, 2}, {1, 2}), make(host(), {1, 2, 3}, {1, 3})};
  EXPECT_THROW(host().concatenate(ragged, 0), InvalidArgument);
}

TEST(ShapeOps, ReshapeChecksCount) {
  const Tensor x = make(host(), {1, 2, 3, 4, 5, 6}, {2, 3});
  EXPECT_EQ(host().reshape(x, {3, -1}).shape(), Shape({3, 2}));
  EXPECT_THROW(host().reshape(x, {4}), InvalidArgument);
  EXPECT_EQ(host().expand_dims(x, -1).shape(), Shape({2, 3, 1}));
}

TEST(Elementwise, ClipMaximumTanh) {
  expect_near_all(vals(host().clip(make(host(), {-2, 0.5, 9}, {3}), 0, 1)), {0, 0.5, 1}, 0);
  expect_near_all(vals(host().maximum(make(host(), {0.0}, {1}), make(host(), {1e-12}, {}))), {1e-12}, 0);
  expect_near_all(vals(host().tanh(make(host(), {0.0}, {}))), {0.0}, 0);
  EXPECT_THROW(host().add(make(host(), {1, 2}, {2}), make(host(), {1, 2, 3}, {3})), InvalidArgument);
  EXPECT_THROW(host().add(make(host(), {1}, {1}), make(host(), {1}, {1}, DType::float32)), InvalidDType);
}

TEST(Reductions, Examples) {
  const Tensor x = make(host(), {3, 1, 2, 4}, {2, 2});
  const Tensor m = host().reduce_min(x, -1, true);
  EXPECT_EQ(m.shape(), Shape({2, 1}));
  expect_near_all(vals(m), {1, 2}, 0);
  expect_near_all(vals(host().reduce_mean(make(host(), {1, 2, 3}, {3}))), {2.0}, 0);
  expect_near_all(vals(host().reduce_sum(make(host(), {1, 2, 3, 4}, {2, 2}), 0)), {4, 6}, 0);
  EXPECT_THROW(host().reduce_sum(x, 2), InvalidArgument);
}

TEST(Indexing, GatherScatter) {
  const Tensor p = make(host(), {1, 2, 3, 4}, {2, 2});
  expect_near_all(vals(host().gather_nd(p, make(host(), {1, 0}, {1, 2}, DType::int64))), {3}, 0);
  const Tensor s = host().scatter_nd(make(host(), {0, 0}, {2, 1}, DType::int64), make(host(), {1.0, 2.0}, {2}),
                                     Shape{2});
  expect_near_all(vals(s), {3, 0}, 0);
  const Tensor e = host().gather_nd(p, make(host(), {}, {0}, DType::int64));
  EXPECT_EQ(e.shape(), Shape({0, 2}));
  EXPECT_THROW(host().gather_nd(p, make(host(), {2, 0}, {1, 2}, DType::int64)), IndexError);
  EXPECT_THROW(host().scatter_nd(make(host(), {0}, {1, 1}, DType::int64), make(host(), {1.0}, {1}), Shape{2}, "mean"),
               InvalidArgument);
}

TEST(Linalg, LinearInvSvd) {
  const Tensor y = host().linear(make(host(), {1.0}, {1}), make(host(), {2.0}, {1, 1}), make(host(), {0.5}, {1}));
  expect_near_all(vals(y), {2.5}, 1e-15);
  const Tensor eye = make(host(), {1, 0, 0, 0, 1, 0, 0, 0, 1}, {3, 3});
  expect_near_all(vals(host().inv(eye)), vals(eye), 1e-15);
  EXPECT_THROW(host().inv(make(host(), {1, 2, 2, 4}, {2, 2})), NumericError);

  const Tensor d = make(host(), {3, 0, 0, 0, 2, 0, 0, 0, 1}, {3, 3});
  const auto r = host().svd(d);
  expect_near_all(vals(r.d), {3, 2, 1}, 1e-12);
  const Tensor diag = host().mul(host().expand_dims(r.d, -2), r.u);
  expect_near_all(vals(host().matmul(diag, r.vt)), vals(d), 1e-6);
}

TEST(Random, DeterministicAndUniform) {
  const Tensor a = host().random_uniform(0, 1, Shape{100000}, 7, DType::float64);
  const Tensor b = host().random_uniform(0, 1, Shape{100000}, 7, DType::float64);
  EXPECT_EQ(vals(a), vals(b));
  EXPECT_NEAR(vals(host().reduce_mean(a))[0], 0.5, 0.01);
  const double w0lim = std::sqrt(6.0 / 2.0);
  EXPECT_NEAR(w0lim, 1.7320508, 1e-7);
  for (double v : vals(host().random_uniform(-w0lim, w0lim, Shape{1, 1}, 3))) {
    EXPECT_GE(v, -w0lim);
    EXPECT_LT(v, w0lim);
  }
  EXPECT_THROW(host().random_uniform(1, 1, Shape{1}, 0), InvalidArgument);
}

TEST(ToHost, NestedAndRoundTrip) {
  EXPECT_EQ(host().to_host(host().zeros(Shape{2})), HostValue({0.0, 0.0}));
  EXPECT_EQ(host().to_host(make(host(), {3.0}, {})), HostValue(3.0));
  const Tensor x = make(host(), {1, 2, 3, 4, 5, 6}, {2, 3});
  const Tensor back = host().array(host().to_host(x), DType::float64);
  EXPECT_EQ(back.shape(), x.shape());
  EXPECT_EQ(vals(back), vals(x));
}

TEST(HostBackend, ResolvesAndRejectsGradients) {
  EXPECT_EQ(host().id(), "host");
  EXPECT_TRUE(host().resolves("clip"));
  for (auto op : kCoreOps) EXPECT_TRUE(host().resolves(op));
  EXPECT_THROW(host().execute_with_gradients([](auto) { return std::vector<Tensor>{}; }, {}), UnsupportedError);
}

TEST(Purity, InputsUnchanged) {
  const Tensor x = make(host(), {1, -2, 3}, {3});
  const auto before = vals(x);
  host().abs(x);
  host().reshape(x, {3, 1});
  host().clip(x, 0, 1);
  EXPECT_EQ(vals(x), before);
}
