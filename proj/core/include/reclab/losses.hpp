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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reclab/metrics.hpp"
#include "reclab/numeric.hpp"

namespace reclab {

// Scalar loss (sum reduction over samples) and d(loss)/d(logits), N x C.
struct LossResult {
  double value = 0.0;
  Matrix grad;
};

// Per-class multipliers for weighted cross entropy. Entries are finite and
// non-negative; the constructor enforces it.
class ClassWeights {
 public:
  ClassWeights() = default;
  explicit ClassWeights(std::vector<double> w);

  static ClassWeights uniform(std::size_t num_classes, double value = 1.0);

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t c) const { return w_[c]; }
  std::span<const double> values() const noexcept { return w_; }

  bool operator==(const ClassWeights&) const = default;

 private:
  std::vector<double> w_;
};

LossResult cross_entropy(const Matrix& logits, std::span<const int> labels);

// -sum_c N_c log(geometric mean confidence of c). Returns +inf when a
// true-class probability is exactly zero.
double ce_grouped_form(const Matrix& probs, std::span<const int> labels);

// -sum_n w[y_n] log p_n(y_n). Weights are constants: no gradient flows into
// them.
LossResult weighted_ce(const Matrix& logits, std::span<const int> labels,
                       const ClassWeights& weights);

// 1/N_c; classes with no samples get weight 0.
ClassWeights inverse_frequency_weights(std::span<const std::int64_t> class_counts);

// (1 - beta) / (1 - beta^N_c), rescaled so the weights sum to the class
// count. Classes with no samples get weight 0.
ClassWeights effective_number_weights(std::span<const std::int64_t> class_counts, double beta);

// Weighted CE with weights 1 - R_c. Each weight must lie in [0, 1].
LossResult recall_ce(const Matrix& logits, std::span<const int> labels,
                     const ClassWeights& recall_weights);

// Weights 1 - R_c taken straight from a set of class counts (classes with no
// support get weight 0).
ClassWeights recall_weights_from_stats(const ClassStats& stats);

// Two-term split of the summed recall-loss gradient with respect to the
// first class's logit in a binary problem, using batch-average confidences:
//   recall_term    = FN_0 * (mean p_0 over class-0 samples - 1)
//   precision_term = FP_0 * (mean p_0 over class-1 samples)
struct BinaryRecallGradient {
  double recall_term = 0.0;
  double precision_term = 0.0;
  double sum() const noexcept { return recall_term + precision_term; }
};

BinaryRecallGradient recall_grad_binary_closed_form(const Matrix& probs,
                                                    std::span<const int> labels,
                                                    const ClassStats& stats);

// -sum_n (1 - p_n)^gamma log p_n with the full derivative of the modulating
// factor.
LossResult focal_ce(const Matrix& logits, std::span<const int> labels, double gamma);

// Indices of the ceil(keep_fraction * N) highest-CE samples, sorted by loss
// descending with ties broken by lower index.
std::vector<std::size_t> ohem_kept_indices(const Matrix& logits, std::span<const int> labels,
                                           double keep_fraction);

// CE over the kept hard samples only; the gradient is zero for the rest.
LossResult ohem_ce(const Matrix& logits, std::span<const int> labels, double keep_fraction);

// 1 - mean over classes present in `labels` of the soft Tversky index
//   (sTP + eps) / (sTP + alpha sFP + beta sFN + eps)
// where the soft counts substitute probabilities for indicator values.
// kDice is alpha = beta = 1/2 and kJaccard is alpha = beta = 1.
LossResult soft_region_loss(const Matrix& logits, std::span<const int> labels, RegionMetric kind,
                            double alpha = 0.5, double beta = 0.5, double epsilon = 1e-6);

// Weighted CE with weights FP_c / (FP_c + TP_c). Exists to reproduce the
// false-positive blow-up such a weighting causes.
LossResult precision_loss_demo(const Matrix& logits, std::span<const int> labels,
                               const ClassWeights& precision_weights);

ClassWeights precision_weights_from_stats(const ClassStats& stats);

enum class LossKind {
  kCrossEntropy,
  kWeightedCe,
  kBalancedCe,
  kRecall,
  kFocal,
  kOhem,
  kSoftDice,
  kSoftJaccard,
  kSoftTversky,
  kPrecisionDemo,
};

// Identifiers accepted on the command line and in config files.
const std::vector<std::string>& loss_identifiers();
LossKind parse_loss_kind(std::string_view id);
std::string_view to_string(LossKind kind);

// Weighted and plain cross-entropy variants whose gradient rows are
// softmax - onehot scaled by a per-sample constant.
bool is_ce_family(LossKind kind);

// Whether the loss consumes a ClassWeights vector in compute_loss.
bool uses_class_weights(LossKind kind);

struct LossSpec {
  LossKind kind = LossKind::kCrossEntropy;
  double gamma = 1.0;
  double keep_fraction = 0.7;
  double alpha = 0.5;
  double beta = 0.5;
  double epsilon = 1e-6;
  double smoothing = 0.9;
  double balanced_beta = 0.999;
};

// Dispatches on spec.kind. `weights` is read only by the weighted kinds
// (weighted_ce, balanced_ce, recall, precision_demo).
LossResult compute_loss(const LossSpec& spec, const Matrix& logits, std::span<const int> labels,
                        const ClassWeights& weights);

}  // namespace reclab
