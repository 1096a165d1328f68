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
#include <sstream>

#include "reclab/csv.hpp"
#include "reclab/error.hpp"
#include "reclab/recall_dynamics.hpp"
#include "test_util.hpp"

namespace reclab {
namespace {

ConfusionMatrix cm2(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
  ConfusionMatrix cm(2);
  cm.add(0, 0, a);
  cm.add(0, 1, b);
  cm.add(1, 0, c);
  cm.add(1, 1, d);
  return cm;
}

TEST(RecallState, ColdStartWeightsAreOne) {
  const RecallState s = RecallState::initial(3);
  EXPECT_EQ(s.weights(), ClassWeights::uniform(3, 1.0));
  EXPECT_EQ(s.step, 0);
  EXPECT_THROW(RecallState::initial(3, 1.0), InvalidInput);
}

TEST(RecallState, NoSmoothingTracksBatch) {
  // Class 0 fully recalled, class 1 never.
  const RecallState s = update(RecallState::initial(2, 0.0), cm2(3, 0, 2, 0));
  EXPECT_EQ(s.recall_estimate, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(s.weights(), ClassWeights({0.0, 1.0}));
  EXPECT_EQ(s.step, 1);
}

TEST(RecallState, AbsentClassCarriesOver) {
  RecallState s = RecallState::initial(2, 0.5);
  s.recall_estimate = {0.3, 0.8};
  const RecallState t = update(s, cm2(1, 1, 0, 0));
  EXPECT_DOUBLE_EQ(t.recall_estimate[0], 0.5 * 0.3 + 0.5 * 0.5);
  EXPECT_EQ(t.recall_estimate[1], 0.8);
}

TEST(RecallState, ConvexCombination) {
  RecallState s = RecallState::initial(2, 0.9);
  s.recall_estimate = {0.5, 0.0};
  const RecallState t = update(s, cm2(4, 0, 0, 0));
  EXPECT_NEAR(t.recall_estimate[0], 0.55, 1e-15);
}

TEST(RecallState, StaysInUnitIntervalUnderRandomUpdates) {
  for (double smoothing : {0.0, 0.5, 0.9, 0.99}) {
    RecallState s = RecallState::initial(4, smoothing);
    for (std::uint64_t t = 1; t <= 300; ++t) {
      const auto y = testing::random_labels(t, 10, 4);
      const auto p = testing::random_labels(t * 7 + 1, 10, 4);
      s = update(s, confusion_matrix(p, y, 4));
      for (double r : s.recall_estimate) {
        ASSERT_GE(r, 0.0);
        ASSERT_LE(r, 1.0);
      }
      const ClassWeights w = s.weights();
      for (std::size_t c = 0; c < 4; ++c) ASSERT_EQ(w[c], 1.0 - s.recall_estimate[c]);
    }
  }
}

TEST(RecallState, FullDatasetWithoutSmoothingIsOneMinusRecall) {
  const auto y = testing::random_labels(11, 500, 3);
  const auto p = testing::random_labels(12, 500, 3);
  const ConfusionMatrix cm = confusion_matrix(p, y, 3);
  const RecallState s = update(RecallState::initial(3, 0.0), cm);
  const MetricsReport r = aggregate_metrics(cm);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(s.weights()[c], 1.0 - *r.recall[c]);
}

TEST(RecallState, UpdateIsDeterministic) {
  const RecallState s = RecallState::initial(2, 0.7);
  const auto cm = cm2(2, 3, 1, 4);
  EXPECT_EQ(update(s, cm).recall_estimate, update(s, cm).recall_estimate);
  EXPECT_THROW(update(s, ConfusionMatrix(3)), InvalidInput);
}

TEST(PrecisionState, TracksPredictedClasses) {
  const PrecisionState s = update(PrecisionState::initial(2, 0.0), cm2(2, 0, 2, 0));
  // Class 0 predicted 4 times, 2 correct; class 1 never predicted.
  EXPECT_DOUBLE_EQ(s.precision_estimate[0], 0.5);
  EXPECT_EQ(s.precision_estimate[1], 0.0);
  EXPECT_EQ(s.weights(), ClassWeights({0.5, 1.0}));
}

TEST(Normalize, Basics) {
  EXPECT_EQ(*normalized_weights(ClassWeights({1.0, 1.0})), (std::vector<double>{0.5, 0.5}));
  const auto n = *normalized_weights(ClassWeights({0.2, 0.3, 0.5}));
  EXPECT_NEAR(n[0], 0.2, 1e-15);
  EXPECT_NEAR(n[1], 0.3, 1e-15);
  EXPECT_NEAR(n[2], 0.5, 1e-15);
  EXPECT_FALSE(normalized_weights(ClassWeights({0.0, 0.0})).has_value());
}

TEST(Normalize, ScaleInvariant) {
  CounterRng rng(4, 0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> w(5);
    for (double& v : w) v = rng.uniform();
    // Powers of two scale exactly.
    std::vector<double> scaled(w);
    for (double& v : scaled) v *= 8.0;
    const auto a = *normalized_weights(ClassWeights(w));
    const auto b = *normalized_weights(ClassWeights(scaled));
    EXPECT_EQ(a, b);
    const double k = rng.uniform(0.01, 100.0);
    for (double& v : scaled) v = v / 8.0 * k;
    const auto c = *normalized_weights(ClassWeights(scaled));
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_NEAR(a[i], c[i], 1e-15);
      s += c[i];
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(Normalize, PartialSkipsUndefined) {
  const PartialWeights w{1.0, std::nullopt, 3.0};
  const auto n = *normalized_weights(w);
  EXPECT_EQ(n[0], 0.25);
  EXPECT_FALSE(n[1].has_value());
  EXPECT_EQ(n[2], 0.75);
}

TEST(FocalClassWeights, ClosedForm) {
  const Matrix p(3, 2, {0.9, 0.1, 0.7, 0.3, 0.4, 0.6});
  const std::vector<int> y{0, 0, 1};
  const auto w = focal_class_weights(p, y, 1.0);
  EXPECT_NEAR(*w[0], 0.2, 1e-15);
  EXPECT_NEAR(*w[1], 0.4, 1e-15);
}

TEST(FocalClassWeights, PerfectIsZeroAbsentIsUndefined) {
  const Matrix p(2, 3, {1.0, 0.0, 0.0, 0.0, 1.0, 0.0});
  const std::vector<int> y{0, 1};
  const auto w = focal_class_weights(p, y, 2.0);
  EXPECT_EQ(*w[0], 0.0);
  EXPECT_EQ(*w[1], 0.0);
  EXPECT_FALSE(w[2].has_value());
}

TEST(FocalClassWeights, GammaOneIsOneMinusMeanConfidence) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix p = softmax(testing::random_logits(seed, 30, 4));
    const auto y = testing::random_labels(seed, 30, 4);
    const auto w = focal_class_weights(p, y, 1.0);
    for (int c = 0; c < 4; ++c) {
      double s = 0.0;
      int n = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == c) s += p(i, static_cast<std::size_t>(c)), ++n;
      }
      if (n == 0) continue;
      EXPECT_NEAR(*w[static_cast<std::size_t>(c)], 1.0 - s / n, 1e-12);
    }
  }
}

TEST(Trace, IdenticalWeightsGiveUnitRatio) {
  RecallState s = RecallState::initial(3);
  s.recall_estimate = {0.1, 0.5, 0.7};
  const PartialWeights focal{0.9, 0.5, 0.3};
  WeightTrace trace;
  record_trace(trace, s, focal);
  ASSERT_EQ(trace.records.size(), 1u);
  for (const auto& r : trace.records[0].ratio) EXPECT_NEAR(*r, 1.0, 1e-15);
  double sum = 0.0;
  for (const auto& v : trace.records[0].recall_weight_norm) sum += *v;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Trace, ZeroFocalWeightGivesUndefinedRatio) {
  const RecallState s = RecallState::initial(2);
  WeightTrace trace;
  record_trace(trace, s, PartialWeights{0.0, 0.4});
  EXPECT_FALSE(trace.records[0].ratio[0].has_value());
  EXPECT_TRUE(trace.records[0].ratio[1].has_value());
  EXPECT_THROW(record_trace(trace, RecallState::initial(3), PartialWeights(3)), InvalidInput);
}

TEST(Trace, CsvSchema) {
  RecallState s = RecallState::initial(2);
  WeightTrace trace;
  record_trace(trace, s, PartialWeights{0.5, std::nullopt});
  s.step = 1;
  record_trace(trace, s, PartialWeights{0.5, 0.5});
  std::stringstream ss;
  write_weight_trace_csv(ss, trace);
  const CsvTable t = read_csv(ss);
  EXPECT_EQ(t.header, (std::vector<std::string>{"step", "class_id", "recall_weight_norm",
                                                "focal_weight_norm", "ratio"}));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[1][3], "");
  EXPECT_EQ(t.rows[3][4], "1");
}

}  // namespace
}  // namespace reclab
