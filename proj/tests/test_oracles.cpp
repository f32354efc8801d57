#include <gtest/gtest.h>

#include <cctype>

#include "oracles/parity.hpp"

using namespace templar;
using namespace templar::oracle;

namespace {

std::string test_name(std::string s) {
  for (auto& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return s;
}

std::vector<std::string> names_of(const auto& specs) {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(s.name);
  return out;
}

template <class Specs>
auto find(const Specs& specs, const std::string& name) {
  for (const auto& s : specs) {
    if (s.name == name) return s;
  }
  throw std::logic_error("no spec " + name);
}

}  // namespace

class GradSuite : public ::testing::TestWithParam<std::string> {};

TEST_P(GradSuite, MatchesCentralDifferences) {
  const auto spec = find(grad_specs(), GetParam());
  Rng rng(1234);
  for (int i = 0; i < 60; ++i) {
    const double e = grad_error(spec.make(rng), rng);
    ASSERT_LE(e, kGradTol) << GetParam() << " case " << i;
  }
}

INSTANTIATE_TEST_SUITE_P(Ops, GradSuite, ::testing::ValuesIn(names_of(grad_specs())),
                         [](const auto& info) { return test_name(info.param); });

class ParitySuite : public ::testing::TestWithParam<std::string> {};

TEST_P(ParitySuite, HostMatchesAutodiff) {
  const auto spec = find(parity_specs(), GetParam());
  Rng rng(4321);
  for (int i = 0; i < 120; ++i) ASSERT_LE(parity_error(spec.make(rng)), kParityTol) << GetParam() << " case " << i;
}

INSTANTIATE_TEST_SUITE_P(Ops, ParitySuite, ::testing::ValuesIn(names_of(parity_specs())),
                         [](const auto& info) { return test_name(info.param); });

TEST(GradOracle, CoversEveryOpWithABackwardRule) {
  const auto names = names_of(grad_specs());
  for (const char* op : {"cast", "reshape", "transpose", "expand_dims", "concatenate", "tile", "slice", "sin", "cos",
                         "tanh", "abs", "sqrt", "round", "floor", "negative", "add", "sub", "mul", "div", "pow",
                         "maximum", "minimum", "clip", "reduce_sum", "reduce_mean", "reduce_min", "reduce_max",
                         "gather_nd", "scatter_nd", "matmul", "linear", "linspace"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), op), names.end()) << op;
  }
}

TEST(ParityOracle, CoversEveryCoreOpWithoutGradients) {
  auto names = names_of(parity_specs());
  for (auto op : kCoreOps) {
    if (op == "variable" || op == "execute_with_gradients" || op == "gradient_descent_update") continue;
    const bool covered = std::any_of(names.begin(), names.end(), [&](const std::string& n) {
      return n.rfind(op, 0) == 0 || n.find("elementwise") != std::string::npos;
    });
    EXPECT_TRUE(covered) << op;
  }
}

// The checkers must be able to fail.
TEST(GradOracle, DetectsAMissingGradientPath) {
  // The value flows through the host, so the tape sees a constant.
  GradCase c{{kernels::from_doubles(Shape{3}, std::vector<double>{0.1, 0.2, 0.3}, DType::float64)}, {0},
             [](const Backend& b, std::span<const Tensor> x) {
               return b.mul(x[0], b.array(x[0].array().to_doubles(), x[0].shape(), DType::float64));
             }};
  Rng rng(1);
  EXPECT_GT(grad_error(c, rng), 0.1);
}

TEST(ParityOracle, DetectsBackendDependentResults) {
  ParityCase c{{}, [](const Backend& b, std::span<const Tensor>) {
                 return std::vector<Tensor>{b.full(Shape{2}, b.id() == "host" ? 1.0 : 1.0 + 1e-6, DType::float64)};
               }};
  EXPECT_GT(parity_error(c), kParityTol);
  ParityCase shape{{}, [](const Backend& b, std::span<const Tensor>) {
                     return std::vector<Tensor>{b.zeros(b.id() == "host" ? Shape{2} : Shape{2, 1}, DType::float64)};
                   }};
  EXPECT_EQ(parity_error(shape), std::numeric_limits<double>::infinity());
}
