// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>

#include "rismarl/ad/checkpoint.hpp"
#include "rismarl/ad/layers.hpp"
#include "rismarl/ad/param_store.hpp"
#include "rismarl/ad/tape.hpp"
#include "support.hpp"

namespace rismarl::ad {
namespace {

using rismarl::testing::check_gradients;
using rismarl::testing::random_mat;

constexpr double kTol = 1e-4;

// Scalar probe: dot(out, c) with a fixed random c of the output's shape.
Var probe(Tape& t, Var out, std::uint64_t seed = 99) {
  Rng rng(seed);
  const Mat& v = t.value(out);
  Var c = t.constant(random_mat(static_cast<int>(v.rows()), static_cast<int>(v.cols()), rng));
  return sum(t, mul(t, out, c));
}

struct OpCase {
  std::string name;
  std::vector<std::pair<int, int>> shapes;
  std::function<Var(Tape&, const std::vector<Var>&)> op;
};

std::vector<OpCase> op_cases() {
  return {
      {"matmul", {{3, 4}, {4, 2}}, [](Tape& t, auto& x) { return matmul(t, x[0], x[1]); }},
      {"add", {{3, 2}, {3, 2}}, [](Tape& t, auto& x) { return add(t, x[0], x[1]); }},
      {"sub", {{3, 2}, {3, 2}}, [](Tape& t, auto& x) { return sub(t, x[0], x[1]); }},
      {"mul", {{4, 1}, {4, 1}}, [](Tape& t, auto& x) { return mul(t, x[0], x[1]); }},
      {"scale", {{4, 1}}, [](Tape& t, auto& x) { return scale(t, x[0], -1.7); }},
      {"add_scalar", {{4, 1}}, [](Tape& t, auto& x) { return add_scalar(t, x[0], 0.3); }},
      {"affine", {{3, 5}, {5, 1}, {3, 1}}, [](Tape& t, auto& x) { return affine(t, x[0], x[1], x[2]); }},
      {"tanh", {{5, 1}}, [](Tape& t, auto& x) { return tanh(t, x[0]); }},
      {"sigmoid", {{5, 1}}, [](Tape& t, auto& x) { return sigmoid(t, x[0]); }},
      {"relu", {{5, 1}}, [](Tape& t, auto& x) { return relu(t, x[0]); }},
      {"elu", {{5, 1}}, [](Tape& t, auto& x) { return elu(t, x[0]); }},
      {"abs", {{5, 1}}, [](Tape& t, auto& x) { return abs(t, x[0]); }},
      {"exp", {{5, 1}}, [](Tape& t, auto& x) { return exp(t, x[0]); }},
      {"clamp", {{6, 1}}, [](Tape& t, auto& x) { return clamp(t, x[0], -0.5, 0.5); }},
      {"concat", {{2, 1}, {3, 1}}, [](Tape& t, auto& x) { return concat(t, {x[0], x[1], x[0]}); }},
      {"slice", {{6, 1}}, [](Tape& t, auto& x) { return slice(t, x[0], 2, 3); }},
      {"reshape", {{6, 1}}, [](Tape& t, auto& x) { return reshape(t, x[0], 2, 3); }},
      {"sum", {{3, 2}}, [](Tape& t, auto& x) { return sum(t, x[0]); }},
      {"dot", {{4, 1}, {4, 1}}, [](Tape& t, auto& x) { return dot(t, x[0], x[1]); }},
      {"square", {{4, 1}}, [](Tape& t, auto& x) { return square(t, x[0]); }},
      {"aggregate_sum", {{3, 1}, {3, 1}, {3, 1}},
       [](Tape& t, auto& x) { return aggregate(t, Aggregation::Sum, {x[0], x[1], x[2]}, 3); }},
      {"aggregate_mean", {{3, 1}, {3, 1}, {3, 1}},
       [](Tape& t, auto& x) { return aggregate(t, Aggregation::Mean, {x[2], x[0], x[1]}, 3); }},
      {"aggregate_max", {{3, 1}, {3, 1}, {3, 1}},
       [](Tape& t, auto& x) { return aggregate(t, Aggregation::Max, {x[0], x[1], x[2]}, 3); }},
      {"log_softmax", {{5, 1}}, [](Tape& t, auto& x) { return log_softmax(t, x[0]); }},
      {"gaussian_logprob", {{4, 1}, {4, 1}},
       [](Tape& t, auto& x) {
         Mat s(4, 1);
         s << 0.3, -1.2, 0.8, 0.05;
         return gaussian_logprob(t, x[0], x[1], s);
       }},
      {"bernoulli_logprob", {{4, 1}},
       [](Tape& t, auto& x) {
         Eigen::VectorXi s(4);
         s << 1, 0, 0, 1;
         return bernoulli_logprob(t, x[0], s);
       }},
      {"categorical_logprob", {{6, 1}},
       [](Tape& t, auto& x) {
         Eigen::VectorXi idx(2);
         idx << 2, 0;
         return categorical_logprob(t, x[0], 3, idx);
       }},
  };
}

TEST(Ops, FiniteDifferences) {
  for (const auto& c : op_cases()) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      ParamStore store(seed);
      std::vector<Parameter*> ps;
      for (std::size_t i = 0; i < c.shapes.size(); ++i)
        ps.push_back(&store.add("x" + std::to_string(i), c.shapes[i].first, c.shapes[i].second, InitScheme::Zeros));
      Rng rng(seed * 7 + 1);
      rismarl::testing::randomize(store, rng, 1.0);
      const auto res = check_gradients({&store}, [&](Tape& t) {
        std::vector<Var> xs;
        for (auto* p : ps) xs.push_back(t.param(*p));
        Var y = c.op(t, xs);
        return t.value(y).size() == 1 ? y : probe(t, y);
      });
      EXPECT_LT(res.worst_rel, kTol) << c.name << " seed " << seed << " worst " << res.worst_name;
      EXPECT_GT(res.analytic_norm, 0.0) << c.name;
    }
  }
}

TEST(Ops, ShapeMismatchRejected) {
  Tape t;
  Var a = t.constant(Mat::Zero(3, 2)), b = t.constant(Mat::Zero(3, 1));
  EXPECT_THROW(matmul(t, a, b), InvalidArgument);
  EXPECT_THROW(add(t, a, b), InvalidArgument);
  EXPECT_THROW(concat(t, {a, b}), InvalidArgument);
  EXPECT_THROW(slice(t, b, 2, 2), InvalidArgument);
}

TEST(Ops, ConstantsGetNoGradient) {
  ParamStore s;
  auto& p = s.add("p", 2, 1, InitScheme::Constant, 1.5);
  Tape t;
  Var c = t.constant(Mat::Ones(2, 1));
  Var y = sum(t, mul(t, t.param(p), c));
  EXPECT_FALSE(t.needs_grad(c));
  t.backward(y);
  EXPECT_EQ(p.grad, Mat::Ones(2, 1));
  t.backward(y);
  EXPECT_EQ(p.grad, Mat::Constant(2, 1, 2.0));
}

TEST(Aggregate, SingletonAndEmpty) {
  Tape t;
  Mat v(3, 1);
  v << 1, -2, 4;
  Var x = t.constant(v);
  for (auto k : {Aggregation::Sum, Aggregation::Mean, Aggregation::Max})
    EXPECT_EQ(t.value(aggregate(t, k, {x}, 3)), v);
  EXPECT_EQ(t.value(aggregate(t, Aggregation::Mean, {}, 3)), Mat::Zero(3, 1));
}

TEST(Aggregate, PermutationBitwise) {
  Rng rng(4);
  Tape t;
  std::vector<Var> items;
  for (int i = 0; i < 7; ++i) items.push_back(t.constant(random_mat(5, 1, rng, 1e3)));
  for (auto k : {Aggregation::Sum, Aggregation::Mean, Aggregation::Max}) {
    const Mat ref = t.value(aggregate(t, k, items, 5));
    auto perm = items;
    for (int r = 0; r < 20; ++r) {
      std::shuffle(perm.begin(), perm.end(), rng);
      EXPECT_EQ(t.value(aggregate(t, k, perm, 5)), ref);
    }
  }
}

TEST(Aggregate, MaxTiesGoToFirst) {
  ParamStore s;
  auto& a = s.add("a", 1, 1, InitScheme::Constant, 2.0);
  auto& b = s.add("b", 1, 1, InitScheme::Constant, 2.0);
  Tape t;
  t.backward(aggregate(t, Aggregation::Max, {t.param(a), t.param(b)}, 1));
  EXPECT_EQ(a.grad(0, 0) + b.grad(0, 0), 1.0);
  EXPECT_TRUE(a.grad(0, 0) == 1.0 || b.grad(0, 0) == 1.0);
}

TEST(Dense, IdentityWeights) {
  ParamStore s;
  auto d = Dense::create(s, "d", 3, 3, Activation::Identity);
  d.w->value = Mat::Identity(3, 3);
  Tape t;
  Mat x(3, 1);
  x << 0.5, -1, 2;
  EXPECT_EQ(t.value(d(t, t.constant(x))), x);
  EXPECT_EQ(t.value(d(t, t.constant(Mat::Zero(3, 1)))), Mat::Zero(3, 1));
  EXPECT_THROW(d(t, t.constant(Mat::Zero(2, 1))), InvalidArgument);
}

TEST(Dense, FiniteDifferences) {
  for (auto act : {Activation::Identity, Activation::Tanh, Activation::Sigmoid, Activation::Elu}) {
    ParamStore s(3);
    auto d = Dense::create(s, "d", 4, 3, act);
    Rng rng(5);
    rismarl::testing::randomize(s, rng);
    const Mat x = random_mat(4, 1, rng);
    const auto r = check_gradients({&s}, [&](Tape& t) { return probe(t, d(t, t.constant(x))); });
    EXPECT_LT(r.worst_rel, kTol);
  }
}

TEST(Gru, ZeroParamsFixedPoint) {
  ParamStore s;
  auto g = Gru::create(s, "g", 2, 3);
  g.w->value.setZero();
  g.u->value.setZero();
  Tape t;
  Var h = g(t, t.constant(Mat::Ones(2, 1)), t.constant(Mat::Zero(3, 1)));
  EXPECT_EQ(t.value(h), Mat::Zero(3, 1));
  g.b->value.block(6, 0, 3, 1).setOnes();  // candidate bias 1, update bias 0
  Tape t2;
  h = g(t2, t2.constant(Mat::Ones(2, 1)), t2.constant(Mat::Zero(3, 1)));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(t2.value(h)(i, 0), 0.5 * std::tanh(1.0), 1e-15);
  EXPECT_NEAR(0.5 * std::tanh(1.0), 0.3807970779778823, 1e-15);
}

TEST(Gru, ClosedUpdateGateKeepsState) {
  ParamStore s(2);
  auto g = Gru::create(s, "g", 3, 4);
  g.b->value.block(0, 0, 4, 1).setConstant(-60.0);
  Rng rng(6);
  const Mat h0 = random_mat(4, 1, rng), x = random_mat(3, 1, rng);
  Tape t;
  const Mat h1 = t.value(g(t, t.constant(x), t.constant(h0)));
  EXPECT_LT((h1 - h0).norm(), 1e-20 + 1e-12 * h0.norm());
}

TEST(Gru, FiveStepUnrolledFiniteDifferences) {
  ParamStore s(8);
  auto g = Gru::create(s, "g", 3, 4);
  Rng rng(7);
  rismarl::testing::randomize(s, rng);
  std::vector<Mat> xs;
  for (int k = 0; k < 5; ++k) xs.push_back(random_mat(3, 1, rng));
  const Mat h0 = random_mat(4, 1, rng);
  const auto r = check_gradients({&s}, [&](Tape& t) {
    Var h = t.constant(h0);
    for (const auto& x : xs) h = g(t, t.constant(x), h);
    return probe(t, h);
  });
  EXPECT_LT(r.worst_rel, kTol) << r.worst_name;
}

TEST(HyperMixer, IdentityEquivalentIsSumPlusBias) {
  ParamStore s(4);
  auto m = HyperMixer::create(s, "mix", 3, 2, 2);
  Rng rng(8);
  rismarl::testing::randomize(s, rng);
  m.w1.w->value.setZero();
  m.w1.b->value << 1, 0, 0, 1;  // column-major 2 x 2 identity
  m.b1.w->value.setZero();
  m.b1.b->value.setZero();
  m.w2.w->value.setZero();
  m.w2.b->value.setOnes();
  Mat st = random_mat(3, 1, rng), v(2, 1);
  v << 0.7, 2.5;
  Tape t;
  Var sv = t.constant(st);
  const double bias = t.scalar(m.bias(t, sv));
  EXPECT_NEAR(t.scalar(m(t, sv, t.constant(v))), 3.2 + bias, 1e-14);
}

TEST(HyperMixer, ZeroLocalValuesGiveBiasOnly) {
  ParamStore s(4);
  auto m = HyperMixer::create(s, "mix", 3, 4, 5);
  Rng rng(9);
  rismarl::testing::randomize(s, rng);
  m.b1.w->value.setZero();
  m.b1.b->value.setZero();
  Tape t;
  Var sv = t.constant(random_mat(3, 1, rng));
  EXPECT_NEAR(t.scalar(m(t, sv, t.constant(Mat::Zero(4, 1)))), t.scalar(m.bias(t, sv)), 1e-14);
}

TEST(HyperMixer, FiniteDifferencesIncludingLocalValues) {
  ParamStore s(5);
  auto m = HyperMixer::create(s, "mix", 4, 3, 6);
  auto& v = s.add("v", 3, 1, InitScheme::Zeros);
  Rng rng(10);
  rismarl::testing::randomize(s, rng);
  const Mat st = random_mat(4, 1, rng);
  const auto r = check_gradients({&s}, [&](Tape& t) { return m(t, t.constant(st), t.param(v)); });
  EXPECT_LT(r.worst_rel, kTol) << r.worst_name;
}

TEST(Sgd, ZeroGradientUnchanged) {
  ParamStore s(1);
  Dense::create(s, "d", 3, 2, Activation::Tanh);
  const Mat before = s.at(0).value;
  const auto z = zeros_like(s);
  sgd_update(s, z, 0.1, z, 0.1);
  sgd_descent(s, z, 0.1);
  EXPECT_EQ(s.at(0).value, before);
}

TEST(Sgd, ScalarArithmetic) {
  ParamStore s;
  s.add("p", 1, 1, InitScheme::Constant, 2.0);
  GradBuffer gp{Mat::Constant(1, 1, 3.0)}, gv{Mat::Constant(1, 1, 1.0)};
  sgd_update(s, gp, 0.1, gv, 0.5);
  EXPECT_DOUBLE_EQ(s.at(0).value(0, 0), 2.0 + 0.3 - 0.5);
  sgd_descent(s, gp, 0.5);
  EXPECT_DOUBLE_EQ(s.at(0).value(0, 0), 1.8 - 1.5);
}

TEST(Sgd, NonFiniteGradientThrows) {
  ParamStore s;
  s.add("p", 2, 1, InitScheme::Zeros);
  GradBuffer g{Mat::Zero(2, 1)};
  g[0](1, 0) = std::nan("");
  EXPECT_THROW(sgd_descent(s, g, 0.1), std::runtime_error);
  EXPECT_EQ(s.at(0).value, Mat::Zero(2, 1));
}

TEST(ParamStore, DeterministicInitAndDuplicates) {
  ParamStore a(11), b(11), c(12);
  a.add("w", 3, 3, InitScheme::UniformFanIn, 3);
  b.add("w", 3, 3, InitScheme::UniformFanIn, 3);
  c.add("w", 3, 3, InitScheme::UniformFanIn, 3);
  EXPECT_EQ(a.at(0).value, b.at(0).value);
  EXPECT_NE(a.at(0).value, c.at(0).value);
  EXPECT_LE(a.at(0).value.cwiseAbs().maxCoeff(), 1 / std::sqrt(3.0));
  EXPECT_THROW(a.add("w", 1, 1, InitScheme::Zeros), InvalidArgument);
}

TEST(Checkpoint, BitExactRoundTrip) {
  ParamStore s(77);
  Dense::create(s, "a", 5, 3, Activation::Tanh);
  Gru::create(s, "g", 3, 2);
  Rng rng(12);
  rismarl::testing::randomize(s, rng, 1.0);
  s.at(0).value(0, 0) = 1.0 / 3.0;
  const auto path = (std::filesystem::temp_directory_path() / "rismarl_test_ckpt.bin").string();
  save_checkpoint(s, path);
  const auto r = read_checkpoint(path);
  ASSERT_EQ(r.size(), s.size());
  EXPECT_EQ(r.base_seed(), 77u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(r.at(i).name, s.at(i).name);
    EXPECT_EQ(r.at(i).scheme, s.at(i).scheme);
    EXPECT_EQ(r.at(i).seed, s.at(i).seed);
    EXPECT_EQ(std::memcmp(r.at(i).value.data(), s.at(i).value.data(), sizeof(double) * s.at(i).value.size()), 0);
  }
  ParamStore fresh(77);
  Dense::create(fresh, "a", 5, 3, Activation::Tanh);
  Gru::create(fresh, "g", 3, 2);
  load_checkpoint(fresh, path);
  EXPECT_EQ(fresh.at(3).value, s.at(3).value);
  ParamStore other;
  Dense::create(other, "b", 5, 3, Activation::Tanh);
  EXPECT_THROW(load_checkpoint(other, path), std::exception);
  std::remove(path.c_str());
  EXPECT_THROW(read_checkpoint(path), std::runtime_error);
}

}  // namespace
}  // namespace rismarl::ad
