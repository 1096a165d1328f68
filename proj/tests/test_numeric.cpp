/*
 * Copyright 2026 The reclab Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>

#include "reclab/error.hpp"
#include "reclab/losses.hpp"
#include "reclab/numeric.hpp"
#include "test_util.hpp"

namespace reclab {
namespace {

TEST(Softmax, SymmetricLogitsGiveUniform) {
  const Matrix p = softmax(Matrix(1, 2, {0.0, 0.0}));
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(Softmax, LogTwoClosedForm) {
  const Matrix p = softmax(Matrix(1, 2, {std::log(2.0), 0.0}));
  EXPECT_NEAR(p(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p(0, 1), 1.0 / 3.0, 1e-15);
}

TEST(Softmax, HugeLogitsDoNotOverflow) {
  const Matrix p = softmax(Matrix(1, 2, {1000.0, 1000.0}));
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(Softmax, RejectsNonFinite) {
  EXPECT_THROW(softmax(Matrix(1, 2, {NAN, 0.0})), InvalidInput);
  EXPECT_THROW(softmax(Matrix(1, 2, {INFINITY, 0.0})), InvalidInput);
  EXPECT_THROW(log_softmax(Matrix(1, 2, {0.0, -INFINITY})), InvalidInput);
}

TEST(Softmax, RejectsBadShapes) {
  EXPECT_THROW(softmax(Matrix(1, 1, {0.0})), InvalidInput);
  EXPECT_THROW(softmax(Matrix(0, 3)), InvalidInput);
}

TEST(Softmax, ShiftInvariance) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Matrix z = testing::random_logits(seed, 4, 5);
    CounterRng rng(seed, 5);
    const double a = rng.uniform(-50.0, 50.0);
    Matrix shifted = z;
    for (double& v : shifted.flat()) v += a;
    const Matrix p = softmax(z), q = softmax(shifted);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(p.flat()[i], q.flat()[i], 1e-12);
  }
}

TEST(Softmax, RowsAreStochastic) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix p = softmax(testing::random_logits(seed, 8, 6, 10.0));
    for (std::size_t r = 0; r < p.rows(); ++r) {
      double s = 0.0;
      for (double v : p.row(r)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
        s += v;
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(LogSoftmax, Symmetric) {
  const Matrix l = log_softmax(Matrix(1, 2, {0.0, 0.0}));
  EXPECT_NEAR(l(0, 0), -std::log(2.0), 1e-15);
  EXPECT_NEAR(l(0, 1), -std::log(2.0), 1e-15);
}

TEST(LogSoftmax, DominantLogit) {
  const Matrix l = log_softmax(Matrix(1, 2, {1000.0, 0.0}));
  EXPECT_NEAR(l(0, 0), 0.0, 1e-300);
  EXPECT_NEAR(l(0, 1), -1000.0, 1e-9);
  EXPECT_TRUE(std::isfinite(l(0, 1)));
}

TEST(LogSoftmax, MatchesLogOfSoftmax) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Matrix z = testing::random_logits(seed, 1, 3);
    const Matrix l = log_softmax(z);
    // Independent direct evaluation.
    double denom = 0.0;
    for (double v : z.row(0)) denom += std::exp(v);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(l(0, c), std::log(std::exp(z(0, c)) / denom), 1e-12);
  }
}

TEST(LogSoftmax, ExpRowSumsToOne) {
  const Matrix l = log_softmax(testing::random_logits(9, 16, 7, 20.0));
  for (std::size_t r = 0; r < l.rows(); ++r) {
    double s = 0.0;
    for (double v : l.row(r)) s += std::exp(v);
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Argmax, TiesGoToLowestIndex) {
  EXPECT_EQ(argmax_rows(Matrix(2, 3, {1.0, 1.0, 0.0, 0.0, 2.0, 2.0})), (std::vector<int>{0, 1}));
}

TEST(FiniteDifference, Quadratic) {
  const std::vector<double> x{3.0};
  const auto g = finite_difference_gradient([](std::span<const double> v) { return v[0] * v[0]; }, x, 1e-4);
  EXPECT_NEAR(g[0], 6.0, 1e-6);
}

TEST(FiniteDifference, ConstantIsZero) {
  const std::vector<double> x{1.0, -2.0, 5.0};
  const auto g = finite_difference_gradient([](std::span<const double>) { return 4.2; }, x);
  for (double v : g) EXPECT_EQ(v, 0.0);
}

TEST(FiniteDifference, CubicErrorIsSecondOrder) {
  // d/dx x^3 at x=2 is 12; central error is h^2 exactly for a cubic.
  const std::vector<double> x{2.0};
  auto f = [](std::span<const double> v) { return v[0] * v[0] * v[0]; };
  for (double h : {1e-2, 1e-3}) {
    const auto g = finite_difference_gradient(f, x, h);
    EXPECT_NEAR(g[0] - 12.0, h * h, 1e-9);
  }
}

TEST(FiniteDifference, NonFiniteThrows) {
  const std::vector<double> x{0.0};
  EXPECT_THROW(finite_difference_gradient([](std::span<const double> v) { return std::log(v[0]); }, x),
               OracleFailure);
}

TEST(FiniteDifference, MatchesCrossEntropyGradient) {
  const Matrix z = testing::random_logits(4, 1, 4);
  const std::vector<int> y{2};
  const LossResult r = cross_entropy(z, y);
  const auto num = finite_difference_gradient(
      [&](std::span<const double> v) { return cross_entropy(Matrix(1, 4, {v.begin(), v.end()}), y).value; },
      z.flat());
  EXPECT_LE(max_relative_error(r.grad.flat(), num), 1e-5);
}

TEST(MaxRelativeError, UsesFloor) {
  const std::vector<double> a{0.0, 1.0}, n{1e-6, 1.0};
  EXPECT_NEAR(max_relative_error(a, n), 1e-3, 1e-15);
  const std::vector<double> b{2.0}, m{1.0};
  EXPECT_DOUBLE_EQ(max_relative_error(b, m), 0.5);
}

TEST(Matrix, ShapeChecked) {
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), InvalidInput);
}

}  // namespace
}  // namespace reclab
