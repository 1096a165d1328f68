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

#include "reclab/cli/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "reclab/error.hpp"
#include "reclab/losses.hpp"
#include "reclab/metrics.hpp"
#include "reclab/model.hpp"
#include "reclab/numeric.hpp"
#include "reclab/random.hpp"

namespace reclab::cli {

namespace {

constexpr std::size_t kInputDim = 3;
constexpr std::size_t kHidden = 6;
constexpr int kClassCounts[] = {2, 5};
constexpr int kBatchSizes[] = {1, 8, 32};

struct Variant {
  std::string name;
  LossSpec spec;
};

std::vector<Variant> variants() {
  std::vector<Variant> out;
  auto add = [&](std::string name, LossKind kind) {
    LossSpec s;
    s.kind = kind;
    out.push_back({std::move(name), s});
    return &out.back().spec;
  };
  add("ce", LossKind::kCrossEntropy);
  add("weighted_ce", LossKind::kWeightedCe);
  add("balanced_ce", LossKind::kBalancedCe);
  add("recall", LossKind::kRecall);
  add("focal(gamma=0.5)", LossKind::kFocal)->gamma = 0.5;
  add("focal(gamma=1)", LossKind::kFocal)->gamma = 1.0;
  add("focal(gamma=2)", LossKind::kFocal)->gamma = 2.0;
  add("ohem", LossKind::kOhem);
  add("soft_dice", LossKind::kSoftDice);
  add("soft_jaccard", LossKind::kSoftJaccard);
  auto* tv = add("soft_tversky(0.3,0.7)", LossKind::kSoftTversky);
  tv->alpha = 0.3;
  tv->beta = 0.7;
  add("precision_demo", LossKind::kPrecisionDemo);
  return out;
}

struct ModelKind {
  std::string name;
  bool raw_logits = false;
  Arch arch = Arch::kLinear;
  Activation act = Activation::kRelu;
};

const std::vector<ModelKind>& model_kinds() {
  static const std::vector<ModelKind> kinds = {
      {"logits", true, Arch::kLinear, Activation::kRelu},
      {"linear", false, Arch::kLinear, Activation::kRelu},
      {"mlp-relu", false, Arch::kMlp, Activation::kRelu},
      {"mlp-tanh", false, Arch::kMlp, Activation::kTanh},
  };
  return kinds;
}

std::uint64_t case_key(std::uint64_t seed, int c, int n, std::size_t variant, std::size_t model) {
  return mix64(seed ^ mix64((static_cast<std::uint64_t>(c) << 48) ^
                            (static_cast<std::uint64_t>(n) << 32) ^ (variant << 16) ^ model));
}

Matrix random_matrix(CounterRng& rng, std::size_t rows, std::size_t cols, double scale) {
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = scale * rng.normal();
  return m;
}

std::vector<int> random_labels(CounterRng& rng, std::size_t n, int c) {
  std::vector<int> labels(n);
  for (int& y : labels) y = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(c)));
  return labels;
}

std::vector<std::int64_t> label_counts(std::span<const int> labels, int c) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(c), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

// The weights a weighted loss would see for this batch, frozen at the base
// point.
ClassWeights frozen_weights(const LossSpec& spec, const Matrix& logits, std::span<const int> labels) {
  const int c = static_cast<int>(logits.cols());
  const auto counts = label_counts(labels, c);
  switch (spec.kind) {
    case LossKind::kWeightedCe: return inverse_frequency_weights(counts);
    case LossKind::kBalancedCe: return effective_number_weights(counts, spec.balanced_beta);
    case LossKind::kRecall:
    case LossKind::kPrecisionDemo: {
      const auto stats = class_stats(confusion_matrix(argmax_rows(logits), labels, c));
      return spec.kind == LossKind::kRecall ? recall_weights_from_stats(stats)
                                            : precision_weights_from_stats(stats);
    }
    default: return ClassWeights::uniform(logits.cols());
  }
}

// Smallest gap between the kept and dropped per-sample losses around the
// OHEM cut, or +inf when nothing is dropped.
double ohem_margin(const LossSpec& spec, const Matrix& logits, std::span<const int> labels) {
  const auto kept = ohem_kept_indices(logits, labels, spec.keep_fraction);
  if (kept.size() == labels.size()) return HUGE_VAL;
  const Matrix lp = log_softmax(logits);
  std::vector<double> loss(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) loss[i] = -lp(i, static_cast<std::size_t>(labels[i]));
  std::vector<bool> is_kept(labels.size(), false);
  for (auto k : kept) is_kept[k] = true;
  double min_kept = HUGE_VAL, max_dropped = -HUGE_VAL;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (is_kept[i]) min_kept = std::min(min_kept, loss[i]);
    else max_dropped = std::max(max_dropped, loss[i]);
  }
  return min_kept - max_dropped;
}

// Moves first-layer biases until every hidden pre-activation is at least
// kKinkMargin away from the ReLU kink.
void clear_relu_kinks(ModelParams& params, const Matrix& x) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto fr = forward(params, x);
    const Matrix& pre = fr.cache.pre_activation;
    bool clean = true;
    for (std::size_t j = 0; j < pre.cols(); ++j) {
      for (std::size_t i = 0; i < pre.rows(); ++i) {
        if (std::abs(pre(i, j)) < kKinkMargin) {
          params.b1()[j] += 3.0 * kKinkMargin;
          clean = false;
          break;
        }
      }
    }
    if (clean) return;
  }
  throw OracleFailure("could not move hidden units away from the ReLU kink");
}

double check_case(const Variant& v, const ModelKind& mk, int c, int n, std::uint64_t key,
                  double perturbation) {
  CounterRng rng(key, 0);
  const auto labels = random_labels(rng, static_cast<std::size_t>(n), c);
  const auto nc = static_cast<std::size_t>(c);
  const auto nn = static_cast<std::size_t>(n);

  if (mk.raw_logits) {
    Matrix logits = random_matrix(rng, nn, nc, 1.5);
    if (v.spec.kind == LossKind::kOhem) {
      for (int t = 0; t < 100 && ohem_margin(v.spec, logits, labels) < kKinkMargin; ++t) {
        logits = random_matrix(rng, nn, nc, 1.5);
      }
    }
    const ClassWeights w = frozen_weights(v.spec, logits, labels);
    const LossResult base = compute_loss(v.spec, logits, labels, w);
    std::vector<double> analytic(base.grad.values());
    for (double& g : analytic) g *= 1.0 + perturbation;
    const auto numeric = finite_difference_gradient(
        [&](std::span<const double> z) {
          return compute_loss(v.spec, Matrix(nn, nc, {z.begin(), z.end()}), labels, w).value;
        },
        logits.flat());
    return max_relative_error(analytic, numeric);
  }

  const Matrix x = random_matrix(rng, nn, kInputDim, 1.0);
  ModelParams params = init_model(key, mk.arch, kInputDim, kHidden, nc, mk.act);
  // Larger-than-default weights so the logits are not all near zero.
  for (double& p : params.flat()) p = 1.2 * rng.normal();
  if (mk.arch == Arch::kMlp && mk.act == Activation::kRelu) clear_relu_kinks(params, x);
  if (v.spec.kind == LossKind::kOhem) {
    for (int t = 0; t < 100 && ohem_margin(v.spec, predict_logits(params, x), labels) < kKinkMargin; ++t) {
      for (double& p : params.flat()) p = 1.2 * rng.normal();
      if (mk.arch == Arch::kMlp && mk.act == Activation::kRelu) clear_relu_kinks(params, x);
    }
  }
  const auto fr = forward(params, x);
  const ClassWeights w = frozen_weights(v.spec, fr.logits, labels);
  const LossResult base = compute_loss(v.spec, fr.logits, labels, w);
  const ModelParams grad = backward(params, fr.cache, base.grad);
  std::vector<double> analytic(grad.flat().begin(), grad.flat().end());
  for (double& g : analytic) g *= 1.0 + perturbation;
  ModelParams probe = params;
  const auto numeric = finite_difference_gradient(
      [&](std::span<const double> theta) {
        std::copy(theta.begin(), theta.end(), probe.flat().begin());
        return compute_loss(v.spec, predict_logits(probe, x), labels, w).value;
      },
      params.flat());
  return max_relative_error(analytic, numeric);
}

std::vector<IdentityRow> identity_checks(const std::vector<std::uint64_t>& seeds) {
  constexpr int kBatches = 100;
  constexpr std::size_t kN = 64;
  std::vector<IdentityRow> rows;
  for (int c : {2, 5, 10}) {
    IdentityRow grouped{"grouped_ce", c, 0, 0.0, kIdentityTolerance};
    IdentityRow inv{"inverse_frequency_geomean", c, 0, 0.0, kIdentityTolerance};
    for (std::uint64_t seed : seeds) {
      for (int b = 0; b < kBatches; ++b) {
        CounterRng rng(case_key(seed, c, b, 0xE1, 0), 1);
        const Matrix logits = random_matrix(rng, kN, static_cast<std::size_t>(c), 2.0);
        const auto labels = random_labels(rng, kN, c);
        const Matrix probs = softmax(logits);
        const double ce = cross_entropy(logits, labels).value;
        grouped.max_abs_error = std::max(grouped.max_abs_error, std::abs(ce - ce_grouped_form(probs, labels)));
        ++grouped.batches;

        const auto counts = label_counts(labels, c);
        const double wce = weighted_ce(logits, labels, inverse_frequency_weights(counts)).value;
        double geo = 0.0;
        for (int k = 0; k < c; ++k) {
          if (auto g = geometric_mean_confidence(probs, labels, k)) geo -= std::log(*g);
        }
        inv.max_abs_error = std::max(inv.max_abs_error, std::abs(wce - geo));
        ++inv.batches;
      }
    }
    rows.push_back(grouped);
    rows.push_back(inv);
  }

  IdentityRow binary{"binary_recall_decomposition", 2, 0, 0.0, kIdentityTolerance};
  for (std::uint64_t seed : seeds) {
    for (int b = 0; b < 50; ++b) {
      CounterRng rng(case_key(seed, 2, b, 0xE8, 0), 1);
      const Matrix logits = random_matrix(rng, kN, 2, 1.5);
      const auto labels = random_labels(rng, kN, 2);
      const auto stats = class_stats(confusion_matrix(argmax_rows(logits), labels, 2));
      const LossResult r = recall_ce(logits, labels, recall_weights_from_stats(stats));
      double dz0 = 0.0;
      for (std::size_t i = 0; i < kN; ++i) dz0 += r.grad(i, 0);
      const double closed = recall_grad_binary_closed_form(softmax(logits), labels, stats).sum();
      binary.max_abs_error = std::max(binary.max_abs_error, std::abs(dz0 - closed));
      ++binary.batches;
    }
  }
  rows.push_back(binary);
  return rows;
}

}  // namespace

bool GradcheckReport::passed() const noexcept {
  return std::all_of(gradients.begin(), gradients.end(), [](const auto& r) { return r.passed(); }) &&
         std::all_of(identities.begin(), identities.end(), [](const auto& r) { return r.passed(); });
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
  if (!(options.tolerance > 0.0)) throw InvalidInput("gradcheck tolerance must be positive");
  if (options.seeds.empty()) throw InvalidInput("gradcheck needs at least one seed");
  GradcheckReport report;
  const auto vs = variants();
  const auto& models = model_kinds();
  for (std::size_t vi = 0; vi < vs.size(); ++vi) {
    const double tol = is_ce_family(vs[vi].spec.kind) ? options.tolerance / 10.0 : options.tolerance;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
      for (int c : kClassCounts) {
        for (int n : kBatchSizes) {
          GradcheckRow row{vs[vi].name, models[mi].name, c, n, 0.0, tol};
          for (std::uint64_t seed : options.seeds) {
            const double err = check_case(vs[vi], models[mi], c, n, case_key(seed, c, n, vi, mi),
                                          options.perturbation);
            row.max_rel_error = std::max(row.max_rel_error, std::isfinite(err) ? err : HUGE_VAL);
          }
          report.gradients.push_back(row);
        }
      }
    }
  }
  report.identities = identity_checks(options.seeds);
  return report;
}

void print_gradcheck_report(std::ostream& out, const GradcheckReport& report) {
  const auto flags = out.flags();
  out << std::left << std::setw(24) << "loss" << std::setw(10) << "model" << std::setw(4) << "C"
      << std::setw(5) << "N" << std::setw(14) << "max_rel_err" << std::setw(10) << "tol"
      << "status\n";
  for (const auto& r : report.gradients) {
    out << std::left << std::setw(24) << r.loss << std::setw(10) << r.model << std::setw(4)
        << r.num_classes << std::setw(5) << r.batch_size << std::setw(14) << std::scientific
        << std::setprecision(3) << r.max_rel_error << std::setw(10) << r.tolerance
        << (r.passed() ? "ok" : "FAIL") << '\n';
  }
  out << '\n'
      << std::left << std::setw(30) << "identity" << std::setw(4) << "C" << std::setw(9) << "batches"
      << std::setw(14) << "max_abs_err" << std::setw(10) << "tol" << "status\n";
  for (const auto& r : report.identities) {
    out << std::left << std::setw(30) << r.check << std::setw(4) << r.num_classes << std::setw(9)
        << r.batches << std::setw(14) << std::scientific << std::setprecision(3) << r.max_abs_error
        << std::setw(10) << r.tolerance << (r.passed() ? "ok" : "FAIL") << '\n';
  }
  out.flags(flags);
}

}  // namespace reclab::cli
