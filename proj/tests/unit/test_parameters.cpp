#include <gtest/gtest.h>

#include <cmath>

#include "gna/autodiff.hpp"
#include "gna/error.hpp"
#include "gna/parameters.hpp"

namespace gna {
namespace {

TEST(ParameterSet, InsertionOrderAndLookup) {
  ParameterSet params;
  params.add("b", Tensor({2}));
  params.add("a", Tensor({3, 2}));
  params.add("c", Tensor({1}));
  std::vector<std::string> names;
  for (const auto& p : params) names.push_back(p.name);
  EXPECT_EQ(names, (std::vector<std::string>{"b", "a", "c"}));
  EXPECT_EQ(params.value_count(), 9u);
  EXPECT_TRUE(params.contains("a"));
  EXPECT_FALSE(params.contains("z"));
  EXPECT_THROW(params.at("z"), ContractError);
}

TEST(ParameterSet, DuplicateNamesRejected) {
  ParameterSet params;
  params.add("w", Tensor({2}));
  EXPECT_THROW(params.add("w", Tensor({2})), ContractError);
}

TEST(ParameterSet, BuffersMatchValueShape) {
  ParameterSet params;
  const Parameter& p = params.add("w", Tensor({3, 4}, 1.0));
  EXPECT_EQ(p.grad.shape(), p.value.shape());
  EXPECT_EQ(p.velocity.shape(), p.value.shape());
  EXPECT_EQ(p.second.shape(), p.value.shape());
}

TEST(ParameterSet, StableAddressesAcrossGrowth) {
  ParameterSet params;
  Parameter* first = &params.add("p0", Tensor({1}));
  for (int i = 1; i < 200; ++i) params.add("p" + std::to_string(i), Tensor({1}));
  EXPECT_EQ(first, &params.at("p0"));
}

TEST(ParameterSet, CopyIsDeep) {
  ParameterSet a;
  a.add("w", Tensor({2}, 1.0));
  ParameterSet b = a;
  b.at("w").value[0] = 5.0;
  EXPECT_EQ(a.at("w").value[0], 1.0);
  EXPECT_EQ(&b.at("w"), b.find("w"));
}

TEST(ParameterSet, FreezeByPrefix) {
  ParameterSet params;
  params.add("backbone.w", Tensor({1}));
  params.add("backbone.b", Tensor({1}));
  params.add("head.w", Tensor({1}));
  EXPECT_EQ(params.freeze("backbone"), 2u);
  EXPECT_TRUE(params.at("backbone.b").frozen);
  EXPECT_FALSE(params.at("head.w").frozen);
}

TEST(ParameterSet, SnapshotRestore) {
  ParameterSet params;
  params.add("w", Tensor::vector({1, 2}));
  const auto snap = params.snapshot();
  params.at("w").value[0] = 9.0;
  params.restore(snap);
  EXPECT_EQ(params.at("w").value, Tensor::vector({1, 2}));
  EXPECT_THROW(params.restore({}), ContractError);
  EXPECT_THROW(params.restore({Tensor::vector({1, 2, 3})}), ShapeError);
}

TEST(Sgd, SingleStepWithoutMomentum) {
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(1.0));
  p.grad[0] = 2.0;
  sgd_step(params, 0.1, 0.0);
  EXPECT_DOUBLE_EQ(p.value[0], 0.8);
  EXPECT_EQ(p.grad[0], 0.0);
}

TEST(Sgd, MomentumAccumulates) {
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(1.0));
  p.grad[0] = 1.0;
  sgd_step(params, 0.1, 0.9);
  const double first = 1.0 - p.value[0];
  const double before = p.value[0];
  p.grad[0] = 1.0;
  sgd_step(params, 0.1, 0.9);
  const double second = before - p.value[0];
  EXPECT_GT(second, first);
  EXPECT_DOUBLE_EQ(second, 0.1 * 1.9);
}

TEST(Sgd, ConvergesOnQuadratic) {
  // (p - 3)^2 with lr 0.1: the error contracts by 0.8 per step, so after
  // 100 steps it is 3 * 0.8^100 ~ 6e-10.
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(0.0));
  for (int i = 0; i < 100; ++i) {
    Graph g;
    Var d = add(g.param(p), g.constant(Tensor::scalar(-3.0)));
    backward(mul(d, d), params);
    sgd_step(params, 0.1, 0.0);
  }
  EXPECT_NEAR(p.value[0], 3.0, 1e-3);
  EXPECT_NEAR(p.value[0], 3.0 - 3.0 * std::pow(0.8, 100), 1e-12);
}

TEST(Sgd, ConvergesOnQuadraticWithMomentum) {
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(0.0));
  for (int i = 0; i < 100; ++i) {
    Graph g;
    Var d = add(g.param(p), g.constant(Tensor::scalar(-3.0)));
    backward(mul(d, d), params);
    sgd_step(params, 0.1, 0.5);
  }
  EXPECT_NEAR(p.value[0], 3.0, 1e-3);
}

TEST(Sgd, FrozenEntriesUntouched) {
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(1.0));
  p.frozen = true;
  p.grad[0] = 5.0;
  sgd_step(params, 0.1, 0.9);
  EXPECT_EQ(p.value[0], 1.0);
  EXPECT_EQ(p.grad[0], 0.0);
}

TEST(Sgd, InvalidArguments) {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  EXPECT_THROW(sgd_step(params, 0.0, 0.9), ConfigError);
  EXPECT_THROW(sgd_step(params, -1.0, 0.9), ConfigError);
  EXPECT_THROW(sgd_step(params, 0.1, 1.0), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  // With bias correction the first update is lr * g / (|g| + eps') = lr * sign(g).
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::vector({1.0, 1.0}));
  p.grad[0] = 4.0;
  p.grad[1] = -0.01;
  adam_step(params, AdamConfig{0.1, 0.9, 0.999, 1e-12}, 1);
  EXPECT_NEAR(p.value[0], 0.9, 1e-9);
  EXPECT_NEAR(p.value[1], 1.1, 1e-9);
  EXPECT_EQ(p.grad[0], 0.0);
}

TEST(Adam, ConvergesOnQuadratic) {
  ParameterSet params;
  Parameter& p = params.add("p", Tensor::scalar(0.0));
  for (std::size_t i = 1; i <= 2000; ++i) {
    Graph g;
    Var d = add(g.param(p), g.constant(Tensor::scalar(-3.0)));
    backward(mul(d, d), params);
    adam_step(params, AdamConfig{0.05}, i);
  }
  EXPECT_NEAR(p.value[0], 3.0, 1e-3);
}

TEST(Adam, InvalidArguments) {
  ParameterSet params;
  params.add("p", Tensor::scalar(1.0));
  EXPECT_THROW(adam_step(params, AdamConfig{0.0}, 1), ConfigError);
  EXPECT_THROW(adam_step(params, AdamConfig{0.1, 1.0}, 1), ConfigError);
  EXPECT_THROW(adam_step(params, AdamConfig{}, 0), ConfigError);
}

TEST(Xavier, BoundsAndDeterminism) {
  Rng a(5), b(5);
  const Tensor x = xavier_uniform(30, 20, a);
  const Tensor y = xavier_uniform(30, 20, b);
  EXPECT_EQ(x, y);
  const double bound = std::sqrt(6.0 / 50.0);
  double lo = 1.0, hi = -1.0;
  for (double v : x.values()) {
    EXPECT_LE(std::abs(v), bound);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT(lo, -0.8 * bound);
  EXPECT_GT(hi, 0.8 * bound);
}

TEST(RngTest, FixedSequenceAndRanges) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng r(1);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_LT(r.index(7), 7u);
  }
}

TEST(RngTest, NormalMoments) {
  Rng r(3);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  // Standard errors are 1/sqrt(n) ~ 0.0022 and sqrt(2/n) ~ 0.0032.
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

}  // namespace
}  // namespace gna
