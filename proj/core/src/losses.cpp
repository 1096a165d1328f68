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

#include "reclab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reclab/error.hpp"

namespace reclab {

namespace {

void check_labels(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) {
    throw InvalidInput("label count " + std::to_string(labels.size()) +
                       " does not match batch size " + std::to_string(logits.rows()));
  }
  const int num_classes = static_cast<int>(logits.cols());
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw InvalidInput("label " + std::to_string(y) + " outside [0, " +
                         std::to_string(num_classes) + ")");
    }
  }
}

void check_weights(const Matrix& logits, const ClassWeights& weights) {
  if (weights.size() != logits.cols()) {
    throw InvalidInput("class weight vector has length " + std::to_string(weights.size()) +
                       ", expected " + std::to_string(logits.cols()));
  }
}

void check_unit_interval(const ClassWeights& weights, const char* what) {
  for (double w : weights.values()) {
    if (w > 1.0) throw InvalidInput(std::string(what) + " weight outside [0, 1]");
  }
}

}  // namespace

ClassWeights::ClassWeights(std::vector<double> w) : w_(std::move(w)) {
  for (double v : w_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidInput("class weights must be finite and non-negative");
    }
  }
}

ClassWeights ClassWeights::uniform(std::size_t num_classes, double value) {
  return ClassWeights(std::vector<double>(num_classes, value));
}

LossResult cross_entropy(const Matrix& logits, std::span<const int> labels) {
  return weighted_ce(logits, labels, ClassWeights::uniform(logits.cols()));
}

double ce_grouped_form(const Matrix& probs, std::span<const int> labels) {
  if (labels.size() != probs.rows()) throw InvalidInput("label count does not match batch size");
  const int num_classes = static_cast<int>(probs.cols());
  std::vector<std::int64_t> support(num_classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw InvalidInput("label out of range");
    ++support[y];
  }
  double total = 0.0;
  for (int c = 0; c < num_classes; ++c) {
    if (support[c] == 0) continue;
    const double g = *geometric_mean_confidence(probs, labels, c);
    if (g == 0.0) return HUGE_VAL;
    total -= static_cast<double>(support[c]) * std::log(g);
  }
  return total;
}

LossResult weighted_ce(const Matrix& logits, std::span<const int> labels,
                       const ClassWeights& weights) {
  require_logits(logits);
  check_labels(logits, labels);
  check_weights(logits, weights);
  const Matrix logp = log_softmax(logits);
  LossResult out{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    const double w = weights[y];
    out.value -= w * logp(n, y);
    auto g = out.grad.row(n);
    for (std::size_t c = 0; c < g.size(); ++c) {
      g[c] = w * (std::exp(logp(n, c)) - (c == y ? 1.0 : 0.0));
    }
  }
  return out;
}

ClassWeights inverse_frequency_weights(std::span<const std::int64_t> class_counts) {
  std::vector<double> w(class_counts.size(), 0.0);
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] < 0) throw InvalidInput("class counts must be non-negative");
    if (class_counts[c] > 0) w[c] = 1.0 / static_cast<double>(class_counts[c]);
  }
  return ClassWeights(std::move(w));
}

ClassWeights effective_number_weights(std::span<const std::int64_t> class_counts, double beta) {
  if (!(beta >= 0.0) || beta >= 1.0) throw InvalidInput("balanced beta must lie in [0, 1)");
  std::vector<double> w(class_counts.size(), 0.0);
  double sum = 0.0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    if (class_counts[c] < 0) throw InvalidInput("class counts must be non-negative");
    if (class_counts[c] == 0) continue;
    // 1 - beta^N computed as -expm1(N log beta) to keep precision near beta -> 1.
    const double denom =
        beta == 0.0 ? 1.0
                    : -std::expm1(static_cast<double>(class_counts[c]) * std::log(beta));
    w[c] = (1.0 - beta) / denom;
    sum += w[c];
  }
  if (sum > 0.0) {
    const double scale = static_cast<double>(class_counts.size()) / sum;
    for (double& v : w) v *= scale;
  }
  return ClassWeights(std::move(w));
}

LossResult recall_ce(const Matrix& logits, std::span<const int> labels,
                     const ClassWeights& recall_weights) {
  check_weights(logits, recall_weights);
  check_unit_interval(recall_weights, "recall");
  return weighted_ce(logits, labels, recall_weights);
}

ClassWeights recall_weights_from_stats(const ClassStats& stats) {
  std::vector<double> w(stats.size(), 0.0);
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto& k = stats[c];
    if (k.support() > 0) {
      w[c] = static_cast<double>(k.fn) / static_cast<double>(k.support());
    }
  }
  return ClassWeights(std::move(w));
}

BinaryRecallGradient recall_grad_binary_closed_form(const Matrix& probs,
                                                    std::span<const int> labels,
                                                    const ClassStats& stats) {
  if (probs.cols() != 2 || stats.size() != 2) {
    throw InvalidInput("closed-form recall gradient is defined for two classes only");
  }
  if (labels.size() != probs.rows()) throw InvalidInput("label count does not match batch size");
  double sum_pos = 0.0;
  double sum_neg = 0.0;
  std::int64_t n_pos = 0;
  std::int64_t n_neg = 0;
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] == 0) {
      sum_pos += probs(n, 0);
      ++n_pos;
    } else if (labels[n] == 1) {
      sum_neg += probs(n, 0);
      ++n_neg;
    } else {
      throw InvalidInput("binary labels must be 0 or 1");
    }
  }
  BinaryRecallGradient out;
  if (n_pos > 0) {
    out.recall_term = static_cast<double>(stats[0].fn) * (sum_pos / n_pos - 1.0);
  }
  if (n_neg > 0) {
    out.precision_term = static_cast<double>(stats[0].fp) * (sum_neg / n_neg);
  }
  return out;
}

LossResult focal_ce(const Matrix& logits, std::span<const int> labels, double gamma) {
  if (!(gamma >= 0.0)) throw InvalidInput("focal gamma must be non-negative");
  require_logits(logits);
  check_labels(logits, labels);
  const Matrix logp = log_softmax(logits);
  LossResult out{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    const double log_pt = logp(n, y);
    const double pt = std::exp(log_pt);
    // 1 - p_t summed from the other classes so it stays accurate when p_t ~ 1.
    double q = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      if (c != y) q += std::exp(logp(n, c));
    }
    const double mod = gamma == 0.0 ? 1.0 : std::pow(q, gamma);
    out.value -= mod * log_pt;

    // p_t * d(loss)/d(p_t); the gamma term vanishes as q -> 0 for any gamma > 0.
    double scale = -mod;
    if (gamma != 0.0 && q > 0.0) scale += gamma * std::pow(q, gamma - 1.0) * pt * log_pt;
    auto g = out.grad.row(n);
    for (std::size_t c = 0; c < g.size(); ++c) {
      g[c] = scale * ((c == y ? 1.0 : 0.0) - std::exp(logp(n, c)));
    }
  }
  return out;
}

std::vector<std::size_t> ohem_kept_indices(const Matrix& logits, std::span<const int> labels,
                                           double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw InvalidInput("OHEM keep fraction must lie in (0, 1]");
  }
  require_logits(logits);
  check_labels(logits, labels);
  const Matrix logp = log_softmax(logits);
  const std::size_t n = logits.rows();
  std::vector<double> loss(n);
  for (std::size_t i = 0; i < n; ++i) loss[i] = -logp(i, static_cast<std::size_t>(labels[i]));

  // Guard against 0.7 * 10 landing a hair above 7 in binary.
  const double raw = keep_fraction * static_cast<double>(n);
  std::size_t keep = static_cast<std::size_t>(std::ceil(raw - 1e-9 * raw));
  keep = std::clamp<std::size_t>(keep, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return loss[a] > loss[b]; });
  order.resize(keep);
  return order;
}

LossResult ohem_ce(const Matrix& logits, std::span<const int> labels, double keep_fraction) {
  const auto kept = ohem_kept_indices(logits, labels, keep_fraction);
  const Matrix logp = log_softmax(logits);
  LossResult out{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t n : kept) {
    const auto y = static_cast<std::size_t>(labels[n]);
    out.value -= logp(n, y);
    auto g = out.grad.row(n);
    for (std::size_t c = 0; c < g.size(); ++c) {
      g[c] = std::exp(logp(n, c)) - (c == y ? 1.0 : 0.0);
    }
  }
  return out;
}

LossResult soft_region_loss(const Matrix& logits, std::span<const int> labels, RegionMetric kind,
                            double alpha, double beta, double epsilon) {
  switch (kind) {
    case RegionMetric::kDice:
      alpha = beta = 0.5;
      break;
    case RegionMetric::kJaccard:
      alpha = beta = 1.0;
      break;
    case RegionMetric::kTversky:
      break;
    default:
      throw InvalidInput("soft region loss supports dice, jaccard and tversky only");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InvalidInput("alpha and beta must be >= 0");
  if (!(epsilon > 0.0)) throw InvalidInput("epsilon must be positive");
  require_logits(logits);
  check_labels(logits, labels);

  const Matrix p = softmax(logits);
  const std::size_t n_rows = p.rows();
  const std::size_t n_cls = p.cols();
  std::vector<double> stp(n_cls, 0.0), sfp(n_cls, 0.0), sfn(n_cls, 0.0);
  std::vector<std::int64_t> support(n_cls, 0);
  for (std::size_t n = 0; n < n_rows; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    ++support[y];
    for (std::size_t c = 0; c < n_cls; ++c) {
      if (c == y) {
        stp[c] += p(n, c);
        sfn[c] += 1.0 - p(n, c);
      } else {
        sfp[c] += p(n, c);
      }
    }
  }

  // d(index)/d(p_nc) split by whether sample n belongs to class c.
  std::vector<double> d_in(n_cls, 0.0), d_out(n_cls, 0.0);
  std::size_t present = 0;
  double index_sum = 0.0;
  for (std::size_t c = 0; c < n_cls; ++c) {
    if (support[c] == 0) continue;
    ++present;
    const double num = stp[c] + epsilon;
    const double den = stp[c] + alpha * sfp[c] + beta * sfn[c] + epsilon;
    index_sum += num / den;
    // sFN = N_c - sTP, so d(den)/d(sTP) = 1 - beta.
    d_in[c] = (den - num * (1.0 - beta)) / (den * den);
    d_out[c] = -alpha * num / (den * den);
  }
  const double k = static_cast<double>(present);

  LossResult out{1.0 - index_sum / k, Matrix(n_rows, n_cls)};
  std::vector<double> dl_dp(n_cls);
  for (std::size_t n = 0; n < n_rows; ++n) {
    const auto y = static_cast<std::size_t>(labels[n]);
    double dot = 0.0;
    for (std::size_t c = 0; c < n_cls; ++c) {
      dl_dp[c] = support[c] == 0 ? 0.0 : -(c == y ? d_in[c] : d_out[c]) / k;
      dot += p(n, c) * dl_dp[c];
    }
    auto g = out.grad.row(n);
    for (std::size_t c = 0; c < n_cls; ++c) g[c] = p(n, c) * (dl_dp[c] - dot);
  }
  return out;
}

LossResult precision_loss_demo(const Matrix& logits, std::span<const int> labels,
                               const ClassWeights& precision_weights) {
  check_weights(logits, precision_weights);
  check_unit_interval(precision_weights, "precision");
  return weighted_ce(logits, labels, precision_weights);
}

ClassWeights precision_weights_from_stats(const ClassStats& stats) {
  std::vector<double> w(stats.size(), 0.0);
  for (std::size_t c = 0; c < stats.size(); ++c) {
    const auto& k = stats[c];
    if (k.tp + k.fp > 0) w[c] = static_cast<double>(k.fp) / static_cast<double>(k.tp + k.fp);
  }
  return ClassWeights(std::move(w));
}

namespace {

struct LossName {
  LossKind kind;
  const char* id;
};

constexpr LossName kLossNames[] = {
    {LossKind::kCrossEntropy, "ce"},     {LossKind::kWeightedCe, "weighted_ce"},
    {LossKind::kBalancedCe, "balanced_ce"}, {LossKind::kRecall, "recall"},
    {LossKind::kFocal, "focal"},         {LossKind::kOhem, "ohem"},
    {LossKind::kSoftDice, "soft_dice"},  {LossKind::kSoftJaccard, "soft_jaccard"},
    {LossKind::kSoftTversky, "soft_tversky"}, {LossKind::kPrecisionDemo, "precision_demo"},
};

}  // namespace

const std::vector<std::string>& loss_identifiers() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : kLossNames) v.emplace_back(e.id);
    return v;
  }();
  return ids;
}

LossKind parse_loss_kind(std::string_view id) {
  for (const auto& e : kLossNames) {
    if (id == e.id) return e.kind;
  }
  std::string valid;
  for (const auto& e : kLossNames) {
    if (!valid.empty()) valid += ", ";
    valid += e.id;
  }
  throw InvalidInput("unknown loss identifier '" + std::string(id) + "'; valid: " + valid);
}

std::string_view to_string(LossKind kind) {
  for (const auto& e : kLossNames) {
    if (e.kind == kind) return e.id;
  }
  return "?";
}

bool is_ce_family(LossKind kind) {
  switch (kind) {
    case LossKind::kCrossEntropy:
    case LossKind::kWeightedCe:
    case LossKind::kBalancedCe:
    case LossKind::kRecall:
    case LossKind::kOhem:
    case LossKind::kPrecisionDemo:
      return true;
    default:
      return false;
  }
}

bool uses_class_weights(LossKind kind) {
  switch (kind) {
    case LossKind::kWeightedCe:
    case LossKind::kBalancedCe:
    case LossKind::kRecall:
    case LossKind::kPrecisionDemo:
      return true;
    default:
      return false;
  }
}

LossResult compute_loss(const LossSpec& spec, const Matrix& logits, std::span<const int> labels,
                        const ClassWeights& weights) {
  switch (spec.kind) {
    case LossKind::kCrossEntropy: return cross_entropy(logits, labels);
    case LossKind::kWeightedCe:
    case LossKind::kBalancedCe: return weighted_ce(logits, labels, weights);
    case LossKind::kRecall: return recall_ce(logits, labels, weights);
    case LossKind::kFocal: return focal_ce(logits, labels, spec.gamma);
    case LossKind::kOhem: return ohem_ce(logits, labels, spec.keep_fraction);
    case LossKind::kSoftDice:
      return soft_region_loss(logits, labels, RegionMetric::kDice, 0.5, 0.5, spec.epsilon);
    case LossKind::kSoftJaccard:
      return soft_region_loss(logits, labels, RegionMetric::kJaccard, 1.0, 1.0, spec.epsilon);
    case LossKind::kSoftTversky:
      return soft_region_loss(logits, labels, RegionMetric::kTversky, spec.alpha, spec.beta,
                              spec.epsilon);
    case LossKind::kPrecisionDemo: return precision_loss_demo(logits, labels, weights);
  }
  throw InvalidInput("unknown loss kind");
}

}  // namespace reclab
