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

#include "reclab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "reclab/csv.hpp"
#include "reclab/error.hpp"

namespace reclab {

ConfusionMatrix::ConfusionMatrix(int num_classes) : num_classes_(num_classes) {
  if (num_classes < 1) throw InvalidInput("confusion matrix needs at least one class");
  counts_.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
}

void ConfusionMatrix::add(int label, int pred, std::int64_t count) {
  if (label < 0 || label >= num_classes_ || pred < 0 || pred >= num_classes_) {
    throw InvalidInput("class id out of range: label=" + std::to_string(label) +
                       " pred=" + std::to_string(pred));
  }
  counts_[static_cast<std::size_t>(label) * num_classes_ + pred] += count;
}

ConfusionMatrix& ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) throw InvalidInput("class count mismatch in merge");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

std::int64_t ConfusionMatrix::at(int label, int pred) const {
  return counts_.at(static_cast<std::size_t>(label) * num_classes_ + pred);
}

std::int64_t ConfusionMatrix::row_sum(int label) const {
  std::int64_t s = 0;
  for (int p = 0; p < num_classes_; ++p) s += at(label, p);
  return s;
}

std::int64_t ConfusionMatrix::col_sum(int pred) const {
  std::int64_t s = 0;
  for (int g = 0; g < num_classes_; ++g) s += at(g, pred);
  return s;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t s = 0;
  for (auto v : counts_) s += v;
  return s;
}

ConfusionMatrix confusion_matrix(std::span<const int> preds, std::span<const int> labels,
                                 int num_classes) {
  if (preds.size() != labels.size()) {
    throw InvalidInput("prediction and label sequences differ in length");
  }
  ConfusionMatrix cm(num_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) cm.add(labels[i], preds[i]);
  return cm;
}

ClassStats class_stats(const ConfusionMatrix& cm) {
  ClassStats stats;
  stats.total = cm.total();
  stats.per_class.resize(cm.num_classes());
  for (int c = 0; c < cm.num_classes(); ++c) {
    ClassCounts& k = stats.per_class[c];
    k.tp = cm.at(c, c);
    k.fn = cm.row_sum(c) - k.tp;
    k.fp = cm.col_sum(c) - k.tp;
    k.tn = stats.total - k.tp - k.fn - k.fp;
  }
  return stats;
}

RegionMetric parse_region_metric(std::string_view name) {
  if (name == "recall") return RegionMetric::kRecall;
  if (name == "precision") return RegionMetric::kPrecision;
  if (name == "dice") return RegionMetric::kDice;
  if (name == "jaccard" || name == "iou") return RegionMetric::kJaccard;
  if (name == "f1") return RegionMetric::kF1;
  if (name == "tversky") return RegionMetric::kTversky;
  throw InvalidInput("unknown region metric '" + std::string(name) + "'");
}

std::string_view to_string(RegionMetric kind) {
  switch (kind) {
    case RegionMetric::kRecall: return "recall";
    case RegionMetric::kPrecision: return "precision";
    case RegionMetric::kDice: return "dice";
    case RegionMetric::kJaccard: return "jaccard";
    case RegionMetric::kF1: return "f1";
    case RegionMetric::kTversky: return "tversky";
  }
  return "?";
}

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

// Shared by both representations so identical cardinalities give identical
// doubles.
std::optional<double> metric_from_counts(double tp, double fp, double fn, RegionMetric kind,
                                         double alpha, double beta) {
  switch (kind) {
    case RegionMetric::kRecall: return ratio(tp, tp + fn);
    case RegionMetric::kPrecision: return ratio(tp, tp + fp);
    case RegionMetric::kDice: return ratio(2.0 * tp, 2.0 * tp + fp + fn);
    case RegionMetric::kJaccard: return ratio(tp, tp + fp + fn);
    case RegionMetric::kF1: return ratio(tp, tp + 0.5 * fp + 0.5 * fn);
    case RegionMetric::kTversky: return ratio(tp, tp + alpha * fp + beta * fn);
  }
  throw InvalidInput("unknown region metric");
}

void check_tversky_params(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0)) {
    throw InvalidInput("tversky alpha and beta must be non-negative");
  }
}

}  // namespace

std::optional<double> region_metric(const ClassCounts& counts, RegionMetric kind, double alpha,
                                    double beta) {
  check_tversky_params(alpha, beta);
  return metric_from_counts(static_cast<double>(counts.tp), static_cast<double>(counts.fp),
                            static_cast<double>(counts.fn), kind, alpha, beta);
}

std::optional<double> set_metric_oracle(std::span<const int> gt_set, std::span<const int> pred_set,
                                        int universe, RegionMetric kind, double alpha,
                                        double beta) {
  check_tversky_params(alpha, beta);
  auto to_set = [universe](std::span<const int> xs) {
    std::set<int> s;
    for (int x : xs) {
      if (x < 0 || x >= universe) throw InvalidInput("set element outside the universe");
      s.insert(x);
    }
    return s;
  };
  const std::set<int> g = to_set(gt_set);
  const std::set<int> p = to_set(pred_set);
  std::vector<int> inter;
  std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(inter));
  std::vector<int> uni;
  std::set_union(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(uni));
  const double gi = static_cast<double>(inter.size());
  const double gs = static_cast<double>(g.size());
  const double ps = static_cast<double>(p.size());
  const double us = static_cast<double>(uni.size());

  switch (kind) {
    case RegionMetric::kRecall: return ratio(gi, gs);
    case RegionMetric::kPrecision: return ratio(gi, ps);
    case RegionMetric::kDice: return ratio(2.0 * gi, ps + gs);
    case RegionMetric::kJaccard: return ratio(gi, us);
    case RegionMetric::kF1:
    case RegionMetric::kTversky:
      // Set differences give FP = |P \ G| and FN = |G \ P|.
      return metric_from_counts(gi, ps - gi, gs - gi, kind, alpha, beta);
  }
  throw InvalidInput("unknown region metric");
}

namespace {

std::optional<double> mean_defined(const std::vector<std::optional<double>>& xs) {
  double sum = 0.0;
  int n = 0;
  for (const auto& x : xs) {
    if (x) {
      sum += *x;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

MetricsReport aggregate_metrics(const ConfusionMatrix& cm) {
  const ClassStats stats = class_stats(cm);
  MetricsReport r;
  for (const auto& k : stats.per_class) {
    r.recall.push_back(region_metric(k, RegionMetric::kRecall));
    r.precision.push_back(region_metric(k, RegionMetric::kPrecision));
    r.dice.push_back(region_metric(k, RegionMetric::kDice));
    r.jaccard.push_back(region_metric(k, RegionMetric::kJaccard));
  }
  r.mean_accuracy = mean_defined(r.recall);
  r.mean_iou = mean_defined(r.jaccard);
  return r;
}

std::vector<std::string> metrics_csv_header(int num_classes) {
  std::vector<std::string> h{"mean_accuracy", "mean_iou"};
  for (const char* prefix : {"recall_", "precision_", "dice_", "iou_"}) {
    for (int c = 0; c < num_classes; ++c) h.push_back(prefix + std::to_string(c));
  }
  return h;
}

std::vector<std::string> metrics_csv_row(const MetricsReport& report) {
  std::vector<std::string> row{format_optional(report.mean_accuracy),
                               format_optional(report.mean_iou)};
  for (const auto* v : {&report.recall, &report.precision, &report.dice, &report.jaccard}) {
    for (const auto& x : *v) row.push_back(format_optional(x));
  }
  return row;
}

std::string metrics_to_json(const MetricsReport& report) {
  auto arr = [](const std::vector<std::optional<double>>& xs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& x : xs) a.push_back(x ? nlohmann::json(*x) : nlohmann::json(nullptr));
    return a;
  };
  auto opt = [](const std::optional<double>& x) {
    return x ? nlohmann::json(*x) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["classes"] = report.num_classes();
  j["recall"] = arr(report.recall);
  j["precision"] = arr(report.precision);
  j["dice"] = arr(report.dice);
  j["iou"] = arr(report.jaccard);
  j["mean_accuracy"] = opt(report.mean_accuracy);
  j["mean_iou"] = opt(report.mean_iou);
  return j.dump(2);
}

std::optional<double> geometric_mean_confidence(const Matrix& probs, std::span<const int> labels,
                                                int c) {
  if (labels.size() != probs.rows()) throw InvalidInput("label count does not match batch size");
  double log_sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != c) continue;
    log_sum += std::log(probs(i, static_cast<std::size_t>(c)));
    ++n;
  }
  if (n == 0) return std::nullopt;
  return std::exp(log_sum / static_cast<double>(n));
}

}  // namespace reclab
