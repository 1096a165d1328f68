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

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "reclab/error.hpp"
#include "reclab/metrics.hpp"
#include "reclab/numeric.hpp"
#include "test_util.hpp"

namespace reclab {
namespace {

ConfusionMatrix cm_from(int c, std::initializer_list<std::int64_t> counts) {
  ConfusionMatrix cm(c);
  int i = 0;
  for (auto v : counts) {
    cm.add(i / c, i % c, v);
    ++i;
  }
  return cm;
}

TEST(ConfusionMatrix, HandCount) {
  const std::vector<int> preds{0, 1, 1, 0}, labels{0, 1, 0, 0};
  const ConfusionMatrix cm = confusion_matrix(preds, labels, 2);
  EXPECT_EQ(cm.at(0, 0), 2);
  EXPECT_EQ(cm.at(0, 1), 1);
  EXPECT_EQ(cm.at(1, 0), 0);
  EXPECT_EQ(cm.at(1, 1), 1);
  EXPECT_EQ(cm.total(), 4);
}

TEST(ConfusionMatrix, PerfectPredictionIsDiagonal) {
  const auto y = testing::random_labels(5, 200, 4);
  const ConfusionMatrix cm = confusion_matrix(y, y, 4);
  const auto counts = testing::counts_of(y, 4);
  for (int g = 0; g < 4; ++g) {
    for (int p = 0; p < 4; ++p) {
      if (g != p) {
        EXPECT_EQ(cm.at(g, p), 0);
      }
    }
    EXPECT_EQ(cm.row_sum(g), counts[static_cast<std::size_t>(g)]);
  }
}

TEST(ConfusionMatrix, MatchesTallyOracle) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto y = testing::random_labels(seed, 37, 4);
    const auto p = testing::random_labels(seed + 1000, 37, 4);
    const ConfusionMatrix cm = confusion_matrix(p, y, 4);
    for (int g = 0; g < 4; ++g) {
      for (int q = 0; q < 4; ++q) {
        std::int64_t tally = 0;
        for (std::size_t i = 0; i < y.size(); ++i) tally += (y[i] == g && p[i] == q);
        EXPECT_EQ(cm.at(g, q), tally);
      }
    }
  }
}

TEST(ConfusionMatrix, Errors) {
  const std::vector<int> a{0, 2}, b{0, 1}, c{0};
  EXPECT_THROW(confusion_matrix(a, b, 2), InvalidInput);
  EXPECT_THROW(confusion_matrix(b, c, 2), InvalidInput);
  const std::vector<int> neg{-1, 0};
  EXPECT_THROW(confusion_matrix(neg, b, 2), InvalidInput);
}

TEST(ConfusionMatrix, MergeAddsCounts) {
  ConfusionMatrix a = cm_from(2, {1, 2, 3, 4});
  a.merge(cm_from(2, {1, 1, 1, 1}));
  EXPECT_EQ(a, cm_from(2, {2, 3, 4, 5}));
  EXPECT_THROW(a.merge(ConfusionMatrix(3)), InvalidInput);
}

TEST(ClassStats, HandCount) {
  const ClassStats s = class_stats(cm_from(2, {2, 1, 0, 1}));
  EXPECT_EQ(s[0], (ClassCounts{2, 0, 1, 1}));
  EXPECT_EQ(s[1], (ClassCounts{1, 1, 0, 2}));
  // A false negative in one class is a false positive in the other.
  EXPECT_EQ(s[0].fn, s[1].fp);
  EXPECT_EQ(s[0].fn, 1);
}

TEST(ClassStats, CountsPartitionTotal) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto y = testing::random_labels(seed, 50, 5);
    const auto p = testing::random_labels(seed + 99, 50, 5);
    const ConfusionMatrix cm = confusion_matrix(p, y, 5);
    const ClassStats s = class_stats(cm);
    for (int c = 0; c < 5; ++c) {
      const auto& k = s[static_cast<std::size_t>(c)];
      EXPECT_EQ(k.tp + k.fp + k.fn + k.tn, 50);
      EXPECT_EQ(k.support(), cm.row_sum(c));
    }
  }
}

TEST(ClassStats, BinaryDuality) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto y = testing::random_labels(seed, 20, 2);
    const auto p = testing::random_labels(seed + 7, 20, 2);
    const ClassStats s = class_stats(confusion_matrix(p, y, 2));
    EXPECT_EQ(s[0].fn, s[1].fp);
    EXPECT_EQ(s[1].fn, s[0].fp);
  }
}

TEST(RegionMetric, PlugIn) {
  const ClassCounts k{2, 0, 1, 0};
  EXPECT_DOUBLE_EQ(*region_metric(k, RegionMetric::kRecall), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*region_metric(k, RegionMetric::kPrecision), 1.0);
  EXPECT_DOUBLE_EQ(*region_metric(k, RegionMetric::kDice), 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(*region_metric(k, RegionMetric::kJaccard), 2.0 / 3.0);
}

TEST(RegionMetric, TverskyHalfIsDice) {
  const ClassCounts k{1, 1, 1, 0};
  EXPECT_EQ(*region_metric(k, RegionMetric::kTversky, 0.5, 0.5), 0.5);
  EXPECT_EQ(*region_metric(k, RegionMetric::kDice), 0.5);
  for (std::int64_t tp = 0; tp < 6; ++tp) {
    for (std::int64_t fp = 0; fp < 6; ++fp) {
      for (std::int64_t fn = 0; fn < 6; ++fn) {
        const ClassCounts q{tp, fp, fn, 0};
        EXPECT_EQ(region_metric(q, RegionMetric::kTversky, 0.5, 0.5), region_metric(q, RegionMetric::kDice));
        EXPECT_EQ(region_metric(q, RegionMetric::kF1), region_metric(q, RegionMetric::kDice));
      }
    }
  }
}

TEST(RegionMetric, EmptyClassIsUndefined) {
  const ClassCounts k{0, 0, 0, 7};
  for (auto kind : {RegionMetric::kRecall, RegionMetric::kPrecision, RegionMetric::kDice,
                    RegionMetric::kJaccard, RegionMetric::kF1, RegionMetric::kTversky}) {
    EXPECT_FALSE(region_metric(k, kind).has_value());
  }
}

TEST(RegionMetric, JaccardNotAboveDice) {
  for (std::int64_t tp = 0; tp < 8; ++tp) {
    for (std::int64_t fp = 0; fp < 8; ++fp) {
      for (std::int64_t fn = 0; fn < 8; ++fn) {
        const ClassCounts q{tp, fp, fn, 0};
        const auto j = region_metric(q, RegionMetric::kJaccard);
        const auto d = region_metric(q, RegionMetric::kDice);
        if (j && d) {
          EXPECT_LE(*j, *d);
        }
      }
    }
  }
}

TEST(RegionMetric, ParseNames) {
  EXPECT_EQ(parse_region_metric("jaccard"), RegionMetric::kJaccard);
  EXPECT_EQ(parse_region_metric("tversky"), RegionMetric::kTversky);
  EXPECT_THROW(parse_region_metric("hausdorff"), InvalidInput);
  EXPECT_THROW(region_metric(ClassCounts{1, 1, 1, 0}, RegionMetric::kTversky, -1.0, 0.5), InvalidInput);
}

TEST(SetOracle, CardinalityArithmetic) {
  const std::vector<int> g{0, 1}, p{1, 2};
  EXPECT_DOUBLE_EQ(*set_metric_oracle(g, p, 4, RegionMetric::kRecall), 0.5);
  EXPECT_DOUBLE_EQ(*set_metric_oracle(g, p, 4, RegionMetric::kPrecision), 0.5);
  EXPECT_DOUBLE_EQ(*set_metric_oracle(g, p, 4, RegionMetric::kJaccard), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(*set_metric_oracle(g, p, 4, RegionMetric::kDice), 0.5);
}

TEST(SetOracle, IdenticalSetsScoreOne) {
  const std::vector<int> g{0, 3, 4};
  for (auto kind : {RegionMetric::kRecall, RegionMetric::kPrecision, RegionMetric::kDice,
                    RegionMetric::kJaccard, RegionMetric::kF1}) {
    EXPECT_EQ(*set_metric_oracle(g, g, 6, kind), 1.0);
  }
  EXPECT_EQ(*set_metric_oracle(g, g, 6, RegionMetric::kTversky, 0.3, 0.9), 1.0);
}

TEST(SetOracle, RejectsOutOfUniverse) {
  const std::vector<int> g{0, 6}, p{1};
  EXPECT_THROW(set_metric_oracle(g, p, 6, RegionMetric::kRecall), InvalidInput);
}

// Every (G, P) pair of subsets of a universe of size u.
TEST(SetOracle, ExhaustiveEquivalenceWithCounts) {
  for (int u = 1; u <= 6; ++u) {
    for (int gm = 0; gm < (1 << u); ++gm) {
      for (int pm = 0; pm < (1 << u); ++pm) {
        std::vector<int> g, p, labels(static_cast<std::size_t>(u)), preds(static_cast<std::size_t>(u));
        for (int i = 0; i < u; ++i) {
          if (gm >> i & 1) g.push_back(i);
          if (pm >> i & 1) p.push_back(i);
          labels[static_cast<std::size_t>(i)] = gm >> i & 1;
          preds[static_cast<std::size_t>(i)] = pm >> i & 1;
        }
        const auto k = class_stats(confusion_matrix(preds, labels, 2))[1];
        for (auto kind : {RegionMetric::kRecall, RegionMetric::kPrecision, RegionMetric::kDice,
                          RegionMetric::kJaccard, RegionMetric::kF1}) {
          ASSERT_EQ(set_metric_oracle(g, p, u, kind), region_metric(k, kind));
        }
        ASSERT_EQ(set_metric_oracle(g, p, u, RegionMetric::kTversky, 0.3, 0.7),
                  region_metric(k, RegionMetric::kTversky, 0.3, 0.7));
      }
    }
  }
}

TEST(Aggregate, HandComputation) {
  const MetricsReport r = aggregate_metrics(cm_from(2, {2, 1, 0, 1}));
  EXPECT_NEAR(*r.mean_accuracy, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(*r.mean_iou, 7.0 / 12.0, 1e-15);
}

TEST(Aggregate, DiagonalIsPerfect) {
  const MetricsReport r = aggregate_metrics(cm_from(3, {4, 0, 0, 0, 2, 0, 0, 0, 9}));
  EXPECT_EQ(*r.mean_accuracy, 1.0);
  EXPECT_EQ(*r.mean_iou, 1.0);
}

TEST(Aggregate, UndefinedClassesExcludedFromMeans) {
  // Class 2 never occurs and is never predicted.
  const MetricsReport r = aggregate_metrics(cm_from(3, {1, 1, 0, 0, 2, 0, 0, 0, 0}));
  EXPECT_FALSE(r.recall[2].has_value());
  EXPECT_FALSE(r.jaccard[2].has_value());
  EXPECT_NEAR(*r.mean_accuracy, (0.5 + 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(*r.mean_iou, (0.5 + 2.0 / 3.0) / 2.0, 1e-15);
}

TEST(Aggregate, MeansAreAveragesOfRegionMetrics) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto y = testing::random_labels(seed, 80, 5);
    const auto p = testing::random_labels(seed * 31, 80, 5);
    const ConfusionMatrix cm = confusion_matrix(p, y, 5);
    const MetricsReport r = aggregate_metrics(cm);
    const ClassStats s = class_stats(cm);
    double acc = 0.0, iou = 0.0;
    int na = 0, ni = 0;
    for (int c = 0; c < 5; ++c) {
      if (auto v = region_metric(s[static_cast<std::size_t>(c)], RegionMetric::kRecall)) acc += *v, ++na;
      if (auto v = region_metric(s[static_cast<std::size_t>(c)], RegionMetric::kJaccard)) iou += *v, ++ni;
    }
    EXPECT_NEAR(*r.mean_accuracy, acc / na, 1e-15);
    EXPECT_NEAR(*r.mean_iou, iou / ni, 1e-15);
    EXPECT_LE(*r.mean_iou, *r.mean_accuracy + 1e-15);
  }
}

TEST(Aggregate, PermutationInvariance) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto y = testing::random_labels(seed, 60, 4);
    const auto p = testing::random_labels(seed + 500, 60, 4);
    std::vector<int> perm{0, 1, 2, 3};
    CounterRng rng(seed, 1);
    rng.shuffle(std::span<int>(perm));
    std::vector<int> y2(y.size()), p2(p.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      y2[i] = perm[static_cast<std::size_t>(y[i])];
      p2[i] = perm[static_cast<std::size_t>(p[i])];
    }
    const MetricsReport a = aggregate_metrics(confusion_matrix(p, y, 4));
    const MetricsReport b = aggregate_metrics(confusion_matrix(p2, y2, 4));
    EXPECT_NEAR(*a.mean_accuracy, *b.mean_accuracy, 1e-15);
    EXPECT_NEAR(*a.mean_iou, *b.mean_iou, 1e-15);
  }
}

TEST(Aggregate, CsvAndJson) {
  const MetricsReport r = aggregate_metrics(cm_from(2, {2, 1, 0, 1}));
  const auto header = metrics_csv_header(2);
  const auto row = metrics_csv_row(r);
  ASSERT_EQ(header.size(), row.size());
  EXPECT_EQ(header[0], "mean_accuracy");
  EXPECT_EQ(header[1], "mean_iou");
  const auto j = nlohmann::json::parse(metrics_to_json(r));
  EXPECT_EQ(j["classes"], 2);
  EXPECT_DOUBLE_EQ(j["iou"][1].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(j["mean_iou"].get<double>(), 7.0 / 12.0);
  const MetricsReport u = aggregate_metrics(cm_from(3, {1, 0, 0, 0, 1, 0, 0, 0, 0}));
  EXPECT_TRUE(nlohmann::json::parse(metrics_to_json(u))["recall"][2].is_null());
}

TEST(GeometricMean, ClosedForm) {
  const Matrix probs(2, 2, {0.25, 0.75, 1.0, 0.0});
  const std::vector<int> y{0, 0};
  EXPECT_NEAR(*geometric_mean_confidence(probs, y, 0), 0.5, 1e-15);
  EXPECT_FALSE(geometric_mean_confidence(probs, y, 1).has_value());
}

TEST(GeometricMean, ConstantCase) {
  const Matrix probs(3, 2, {0.3, 0.7, 0.3, 0.7, 0.3, 0.7});
  const std::vector<int> y{0, 0, 0};
  EXPECT_NEAR(*geometric_mean_confidence(probs, y, 0), 0.3, 1e-15);
}

TEST(GeometricMean, LogSpaceMatchesDirectProduct) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix probs = softmax(testing::random_logits(seed, 12, 3, 1.0));
    const auto y = testing::random_labels(seed, 12, 3);
    for (int c = 0; c < 3; ++c) {
      double prod = 1.0;
      int n = 0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == c) prod *= probs(i, static_cast<std::size_t>(c)), ++n;
      }
      const auto g = geometric_mean_confidence(probs, y, c);
      if (n == 0) {
        EXPECT_FALSE(g.has_value());
      } else {
        EXPECT_NEAR(*g, std::pow(prod, 1.0 / n), 1e-12);
      }
    }
  }
}

}  // namespace
}  // namespace reclab
