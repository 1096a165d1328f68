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

#include "reclab/recall_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "reclab/csv.hpp"
#include "reclab/error.hpp"

namespace reclab {

namespace {

void check_smoothing(double smoothing) {
  if (!(smoothing >= 0.0) || smoothing >= 1.0) {
    throw InvalidInput("smoothing must lie in [0, 1)");
  }
}

double blend(double smoothing, double old_value, double batch_value) {
  const double v = smoothing * old_value + (1.0 - smoothing) * batch_value;
  return std::clamp(v, 0.0, 1.0);
}

ClassWeights one_minus(const std::vector<double>& xs) {
  std::vector<double> w(xs.size());
  for (std::size_t c = 0; c < xs.size(); ++c) w[c] = std::clamp(1.0 - xs[c], 0.0, 1.0);
  return ClassWeights(std::move(w));
}

}  // namespace

RecallState RecallState::initial(int num_classes, double smoothing) {
  check_smoothing(smoothing);
  if (num_classes < 1) throw InvalidInput("recall state needs at least one class");
  return RecallState{std::vector<double>(num_classes, 0.0), smoothing, 0};
}

ClassWeights RecallState::weights() const { return one_minus(recall_estimate); }

RecallState update(const RecallState& state, const ConfusionMatrix& batch_cm) {
  if (static_cast<std::size_t>(batch_cm.num_classes()) != state.recall_estimate.size()) {
    throw InvalidInput("batch confusion matrix class count does not match recall state");
  }
  RecallState next = state;
  const ClassStats stats = class_stats(batch_cm);
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto& k = stats[c];
    if (k.support() == 0) continue;
    const double batch_recall = static_cast<double>(k.tp) / static_cast<double>(k.support());
    next.recall_estimate[c] = blend(state.smoothing, state.recall_estimate[c], batch_recall);
  }
  ++next.step;
  return next;
}

PrecisionState PrecisionState::initial(int num_classes, double smoothing) {
  check_smoothing(smoothing);
  if (num_classes < 1) throw InvalidInput("precision state needs at least one class");
  return PrecisionState{std::vector<double>(num_classes, 0.0), smoothing, 0};
}

ClassWeights PrecisionState::weights() const { return one_minus(precision_estimate); }

PrecisionState update(const PrecisionState& state, const ConfusionMatrix& batch_cm) {
  if (static_cast<std::size_t>(batch_cm.num_classes()) != state.precision_estimate.size()) {
    throw InvalidInput("batch confusion matrix class count does not match precision state");
  }
  PrecisionState next = state;
  const ClassStats stats = class_stats(batch_cm);
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto& k = stats[c];
    const std::int64_t predicted = k.tp + k.fp;
    if (predicted == 0) continue;
    const double batch_precision = static_cast<double>(k.tp) / static_cast<double>(predicted);
    next.precision_estimate[c] =
        blend(state.smoothing, state.precision_estimate[c], batch_precision);
  }
  ++next.step;
  return next;
}

std::optional<PartialWeights> normalized_weights(const PartialWeights& w) {
  double sum = 0.0;
  for (const auto& x : w) {
    if (x) sum += *x;
  }
  if (!(sum > 0.0)) return std::nullopt;
  PartialWeights out(w.size());
  for (std::size_t c = 0; c < w.size(); ++c) {
    if (w[c]) out[c] = *w[c] / sum;
  }
  return out;
}

std::optional<std::vector<double>> normalized_weights(const ClassWeights& w) {
  PartialWeights partial(w.values().begin(), w.values().end());
  auto norm = normalized_weights(partial);
  if (!norm) return std::nullopt;
  std::vector<double> out(norm->size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = *(*norm)[c];
  return out;
}

PartialWeights focal_class_weights(const Matrix& probs, std::span<const int> labels,
                                   double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInput("focal gamma must be non-negative");
  if (labels.size() != probs.rows()) throw InvalidInput("label count does not match batch size");
  const std::size_t n_cls = probs.cols();
  std::vector<double> sum(n_cls, 0.0);
  std::vector<std::int64_t> count(n_cls, 0);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int y = labels[n];
    if (y < 0 || static_cast<std::size_t>(y) >= n_cls) throw InvalidInput("label out of range");
    const double q = 1.0 - probs(n, static_cast<std::size_t>(y));
    sum[y] += gamma == 0.0 ? 1.0 : std::pow(std::max(q, 0.0), gamma);
    ++count[y];
  }
  PartialWeights out(n_cls);
  for (std::size_t c = 0; c < n_cls; ++c) {
    if (count[c] > 0) out[c] = sum[c] / static_cast<double>(count[c]);
  }
  return out;
}

void record_trace(WeightTrace& trace, const RecallState& state, const PartialWeights& focal_w) {
  const std::size_t n_cls = state.recall_estimate.size();
  if (focal_w.size() != n_cls) throw InvalidInput("focal weight vector has wrong class count");
  if (trace.num_classes == 0) trace.num_classes = static_cast<int>(n_cls);
  if (static_cast<std::size_t>(trace.num_classes) != n_cls) {
    throw InvalidInput("trace class count changed between records");
  }

  WeightRecord rec;
  rec.step = state.step;
  const ClassWeights rw = state.weights();
  rec.recall_weight.assign(rw.values().begin(), rw.values().end());
  rec.recall_weight_norm =
      normalized_weights(PartialWeights(rec.recall_weight.begin(), rec.recall_weight.end()))
          .value_or(PartialWeights(n_cls));
  rec.focal_weight_norm = normalized_weights(focal_w).value_or(PartialWeights(n_cls));
  rec.ratio.resize(n_cls);
  for (std::size_t c = 0; c < n_cls; ++c) {
    const auto& r = rec.recall_weight_norm[c];
    const auto& f = rec.focal_weight_norm[c];
    if (r && f && *f != 0.0) rec.ratio[c] = *r / *f;
  }
  trace.records.push_back(std::move(rec));
}

void write_weight_trace_csv(std::ostream& out, const WeightTrace& trace) {
  const std::vector<std::string> header{"step", "class_id", "recall_weight_norm",
                                        "focal_weight_norm", "ratio"};
  write_csv_row(out, header);
  for (const auto& rec : trace.records) {
    for (int c = 0; c < trace.num_classes; ++c) {
      const std::vector<std::string> row{std::to_string(rec.step), std::to_string(c),
                                         format_optional(rec.recall_weight_norm[c]),
                                         format_optional(rec.focal_weight_norm[c]),
                                         format_optional(rec.ratio[c])};
      write_csv_row(out, row);
    }
  }
}

}  // namespace reclab
