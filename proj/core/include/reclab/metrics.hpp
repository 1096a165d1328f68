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

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reclab/numeric.hpp"

namespace reclab {

// Counts table; rows are ground-truth classes, columns are predictions.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const noexcept { return num_classes_; }

  void add(int label, int pred, std::int64_t count = 1);
  ConfusionMatrix& merge(const ConfusionMatrix& other);

  std::int64_t at(int label, int pred) const;
  std::int64_t row_sum(int label) const;
  std::int64_t col_sum(int pred) const;
  std::int64_t total() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int num_classes_ = 0;
  std::vector<std::int64_t> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> labels,
                                 int num_classes);

struct ClassCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t support() const noexcept { return tp + fn; }
  bool operator==(const ClassCounts&) const = default;
};

struct ClassStats {
  std::vector<ClassCounts> per_class;
  std::int64_t total = 0;

  const ClassCounts& operator[](std::size_t c) const { return per_class[c]; }
  std::size_t size() const noexcept { return per_class.size(); }
};

ClassStats class_stats(const ConfusionMatrix& cm);

enum class RegionMetric { kRecall, kPrecision, kDice, kJaccard, kF1, kTversky };

RegionMetric parse_region_metric(std::string_view name);
std::string_view to_string(RegionMetric kind);

// Boolean (count) form of each region metric. nullopt when the denominator
// is zero. alpha/beta are read only for Tversky.
std::optional<double> region_metric(const ClassCounts& counts, RegionMetric kind,
                                    double alpha = 0.5, double beta = 0.5);

// Same metrics computed from the ground-truth and predicted index sets of one
// class. Duplicate indices are ignored.
std::optional<double> set_metric_oracle(std::span<const int> gt_set, std::span<const int> pred_set,
                                        int universe, RegionMetric kind, double alpha = 0.5,
                                        double beta = 0.5);

struct MetricsReport {
  std::vector<std::optional<double>> recall;
  std::vector<std::optional<double>> precision;
  std::vector<std::optional<double>> dice;
  std::vector<std::optional<double>> jaccard;
  std::optional<double> mean_accuracy;
  std::optional<double> mean_iou;

  std::size_t num_classes() const noexcept { return recall.size(); }
};

// Per-class metrics plus unweighted means over the classes where each is
// defined.
MetricsReport aggregate_metrics(const ConfusionMatrix& cm);

// Column names matching metrics_csv_row: mean_accuracy, mean_iou, then
// recall_<c>, precision_<c>, dice_<c>, iou_<c> for every class.
std::vector<std::string> metrics_csv_header(int num_classes);
std::vector<std::string> metrics_csv_row(const MetricsReport& report);

// {"classes": C, "recall": [...], "precision": [...], "dice": [...],
//  "iou": [...], "mean_accuracy": x, "mean_iou": y}; undefined values are null.
std::string metrics_to_json(const MetricsReport& report);

// Geometric mean of the true-class probabilities of class c's samples,
// computed in log space. nullopt if the class has no samples.
std::optional<double> geometric_mean_confidence(const Matrix& probs, std::span<const int> labels,
                                                int c);

}  // namespace reclab
