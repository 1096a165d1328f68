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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "reclab/losses.hpp"
#include "reclab/metrics.hpp"
#include "reclab/numeric.hpp"

namespace reclab {

// Per-class weight vector where some entries may be undefined (e.g. focal
// weight of a class absent from the batch).
using PartialWeights = std::vector<std::optional<double>>;

// Running per-class recall estimate R_c,t. Weights are 1 - R.
struct RecallState {
  std::vector<double> recall_estimate;
  // 0 uses the latest batch recall directly; values near 1 average over
  // many steps.
  double smoothing = 0.9;
  std::int64_t step = 0;

  // Cold start: every estimate 0, so the first weights are all 1.
  static RecallState initial(int num_classes, double smoothing = 0.9);

  ClassWeights weights() const;
};

// Exponential moving average toward this batch's recall for every class
// with support in `batch_cm`; absent classes keep their estimate.
RecallState update(const RecallState& state, const ConfusionMatrix& batch_cm);

// Same smoothing rule tracking precision; weights() are FP/(FP+TP), the
// weights of the precision-loss demonstration. Classes never predicted in a
// batch keep their estimate.
struct PrecisionState {
  std::vector<double> precision_estimate;
  double smoothing = 0.9;
  std::int64_t step = 0;

  static PrecisionState initial(int num_classes, double smoothing = 0.9);
  ClassWeights weights() const;
};

PrecisionState update(const PrecisionState& state, const ConfusionMatrix& batch_cm);

// w / sum(w) over the defined entries. nullopt when the defined entries sum
// to zero (or none are defined).
std::optional<PartialWeights> normalized_weights(const PartialWeights& w);
std::optional<std::vector<double>> normalized_weights(const ClassWeights& w);

// Mean of (1 - p_n)^gamma over each class's samples; nullopt for classes
// absent from the batch.
PartialWeights focal_class_weights(const Matrix& probs, std::span<const int> labels,
                                   double gamma);

struct WeightRecord {
  std::int64_t step = 0;
  std::vector<double> recall_weight;
  PartialWeights recall_weight_norm;
  PartialWeights focal_weight_norm;
  // recall_weight_norm / focal_weight_norm; nullopt where the focal weight
  // is zero or undefined.
  PartialWeights ratio;
};

struct WeightTrace {
  int num_classes = 0;
  std::vector<WeightRecord> records;
};

void record_trace(WeightTrace& trace, const RecallState& state, const PartialWeights& focal_w);

// Columns: step, class_id, recall_weight_norm, focal_weight_norm, ratio.
// One row per (record, class); undefined values are empty fields.
void write_weight_trace_csv(std::ostream& out, const WeightTrace& trace);

}  // namespace reclab
