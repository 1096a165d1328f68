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

#include "reclab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>

#include "reclab/csv.hpp"
#include "reclab/random.hpp"

namespace reclab {

namespace {

constexpr std::uint64_t kBatchStream = 0x6261746368ULL;
constexpr std::size_t kEvalChunkRows = 1 << 14;

struct Batch {
  Matrix features;
  std::vector<int> labels;
};

// Epoch-wise shuffled sequential batches over groups; the last short batch
// of an epoch is kept.
class BatchSampler {
 public:
  BatchSampler(const Dataset& data, std::size_t batch_groups, std::uint64_t seed)
      : data_(data), batch_(batch_groups), rng_(seed, kBatchStream), order_(data.num_groups()) {
    std::iota(order_.begin(), order_.end(), 0);
    reshuffle();
  }

  Batch next() {
    if (pos_ >= order_.size()) reshuffle();
    const std::size_t end = std::min(pos_ + batch_, order_.size());
    const std::size_t g = data_.group_size;
    const std::size_t d = data_.dim();
    Batch b;
    std::vector<double> feat;
    feat.reserve((end - pos_) * g * d);
    b.labels.reserve((end - pos_) * g);
    for (std::size_t i = pos_; i < end; ++i) {
      const std::size_t first = order_[i] * g;
      for (std::size_t r = first; r < first + g; ++r) {
        auto row = data_.features.row(r);
        feat.insert(feat.end(), row.begin(), row.end());
        b.labels.push_back(data_.labels[r]);
      }
    }
    b.features = Matrix(b.labels.size(), d, std::move(feat));
    pos_ = end;
    return b;
  }

 private:
  void reshuffle() {
    rng_.shuffle(std::span<std::size_t>(order_));
    pos_ = 0;
  }

  const Dataset& data_;
  std::size_t batch_;
  CounterRng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

PartialWeights batch_recall(const ConfusionMatrix& cm) {
  const ClassStats stats = class_stats(cm);
  PartialWeights out(stats.size());
  for (std::size_t c = 0; c < stats.size(); ++c) out[c] = region_metric(stats[c], RegionMetric::kRecall);
  return out;
}

}  // namespace

Dataset materialize(const DataSource& source) {
  return std::visit(
      [](const auto& s) -> Dataset {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return load_dataset(s);
        } else if constexpr (std::is_same_v<T, BlobSpec>) {
          return make_blobs(s);
        } else {
          return scenes_to_dataset(make_scenes(s));
        }
      },
      source);
}

void validate(const TrainConfig& config) {
  if (!(config.optimizer.learning_rate > 0.0)) throw InvalidInput("learning rate must be > 0");
  if (config.batch_size < 1) throw InvalidInput("batch size must be >= 1");
  if (config.iterations < 1) throw InvalidInput("iterations must be >= 1");
  if (config.eval_interval < 1) throw InvalidInput("eval interval must be >= 1");
  if (!(config.loss.smoothing >= 0.0) || config.loss.smoothing >= 1.0) {
    throw InvalidInput("smoothing must lie in [0, 1)");
  }
  if (!(config.loss.keep_fraction > 0.0) || config.loss.keep_fraction > 1.0) {
    throw InvalidInput("keep_fraction must lie in (0, 1]");
  }
  if (!(config.loss.gamma >= 0.0) || !(config.trace_gamma >= 0.0)) {
    throw InvalidInput("gamma must be >= 0");
  }
  if (!(config.loss.epsilon > 0.0)) throw InvalidInput("epsilon must be > 0");
  if (!(config.loss.alpha >= 0.0) || !(config.loss.beta >= 0.0)) {
    throw InvalidInput("alpha and beta must be >= 0");
  }
  if (!(config.loss.balanced_beta >= 0.0) || config.loss.balanced_beta >= 1.0) {
    throw InvalidInput("balanced_beta must lie in [0, 1)");
  }
  if (!(config.optimizer.beta1 >= 0.0 && config.optimizer.beta1 < 1.0) ||
      !(config.optimizer.beta2 >= 0.0 && config.optimizer.beta2 < 1.0) ||
      !(config.optimizer.epsilon > 0.0)) {
    throw InvalidInput("adam betas must lie in [0, 1) and epsilon must be > 0");
  }
}

std::pair<Dataset, Dataset> resolve_datasets(const TrainConfig& config) {
  Dataset data = materialize(config.data);
  if (config.eval_data) return {std::move(data), materialize(*config.eval_data)};
  return split_holdout(data, config.holdout_fraction, config.seed);
}

TrainLog train(const TrainConfig& config) {
  auto [train_data, eval_data] = resolve_datasets(config);
  return train(config, train_data, eval_data);
}

TrainLog train(const TrainConfig& config, const Dataset& train_data, const Dataset& eval_data) {
  validate(config);
  if (train_data.size() == 0) throw InvalidInput("training set is empty");
  if (eval_data.dim() != train_data.dim() || eval_data.num_classes != train_data.num_classes) {
    throw InvalidInput("evaluation data shape does not match training data");
  }
  const int num_classes = train_data.num_classes;
  const auto n_cls = static_cast<std::size_t>(num_classes);

  ModelParams params = init_model(config.model.seed, config.model.arch, train_data.dim(),
                                  config.model.hidden, n_cls, config.model.activation);
  OptimizerState opt_state;

  ClassWeights static_weights = ClassWeights::uniform(n_cls);
  const auto counts = train_data.class_counts();
  if (config.loss.kind == LossKind::kWeightedCe) {
    static_weights = inverse_frequency_weights(counts);
  } else if (config.loss.kind == LossKind::kBalancedCe) {
    static_weights = effective_number_weights(counts, config.loss.balanced_beta);
  }
  RecallState recall_state = RecallState::initial(num_classes, config.loss.smoothing);
  PrecisionState precision_state = PrecisionState::initial(num_classes, config.loss.smoothing);

  TrainLog log;
  log.num_classes = num_classes;
  log.weights.num_classes = num_classes;
  BatchSampler sampler(train_data, config.batch_size, config.seed);

  for (std::int64_t it = 1; it <= config.iterations; ++it) {
    const Batch batch = sampler.next();
    const ForwardResult fwd = forward(params, batch.features);
    if (!std::all_of(fwd.logits.flat().begin(), fwd.logits.flat().end(),
                     [](double v) { return std::isfinite(v); })) {
      log.final_params = params;
      throw TrainingAborted("non-finite logits at iteration " + std::to_string(it), params, log);
    }
    const ConfusionMatrix cm =
        confusion_matrix(argmax_rows(fwd.logits), batch.labels, num_classes);

    // Weights come from statistics through the previous step.
    ClassWeights weights = static_weights;
    if (config.loss.kind == LossKind::kRecall) weights = recall_state.weights();
    if (config.loss.kind == LossKind::kPrecisionDemo) weights = precision_state.weights();

    recall_state = update(recall_state, cm);
    precision_state = update(precision_state, cm);
    const Matrix probs = softmax(fwd.logits);
    record_trace(log.weights, recall_state,
                 focal_class_weights(probs, batch.labels, config.trace_gamma));

    LossResult loss = compute_loss(config.loss, fwd.logits, batch.labels, weights);
    const double n = static_cast<double>(batch.labels.size());
    if (!std::isfinite(loss.value)) {
      log.final_params = params;
      throw TrainingAborted("non-finite loss at iteration " + std::to_string(it), params, log);
    }
    for (double& g : loss.grad.flat()) g /= n;
    const ModelParams grads = backward(params, fwd.cache, loss.grad);
    try {
      optimizer_step(params.flat(), grads.flat(), opt_state, config.optimizer);
    } catch (const NumericalError& e) {
      log.final_params = params;
      throw TrainingAborted(std::string(e.what()) + " at iteration " + std::to_string(it),
                            params, log);
    }

    log.train.push_back({it, loss.value / n, batch_recall(cm)});
    if (it % config.eval_interval == 0 || it == config.iterations) {
      log.eval.push_back({it, evaluate(params, eval_data)});
    }
  }
  log.final_params = std::move(params);
  return log;
}

ConfusionMatrix predict_confusion(const ModelParams& params, const Dataset& data) {
  ConfusionMatrix cm(data.num_classes);
  const std::size_t d = data.dim();
  for (std::size_t start = 0; start < data.size(); start += kEvalChunkRows) {
    const std::size_t end = std::min(start + kEvalChunkRows, data.size());
    auto src = data.features.flat().subspan(start * d, (end - start) * d);
    const Matrix chunk(end - start, d, std::vector<double>(src.begin(), src.end()));
    const auto preds = argmax_rows(predict_logits(params, chunk));
    for (std::size_t i = 0; i < preds.size(); ++i) cm.add(data.labels[start + i], preds[i]);
  }
  return cm;
}

MetricsReport evaluate(const ModelParams& params, const Dataset& data) {
  return aggregate_metrics(predict_confusion(params, data));
}

void write_train_csv(std::ostream& out, const TrainLog& log) {
  std::vector<std::string> header{"iteration", "loss"};
  for (int c = 0; c < log.num_classes; ++c) header.push_back("recall_" + std::to_string(c));
  write_csv_row(out, header);
  for (const auto& r : log.train) {
    std::vector<std::string> row{std::to_string(r.iteration), format_double(r.loss)};
    for (const auto& x : r.batch_recall) row.push_back(format_optional(x));
    write_csv_row(out, row);
  }
}

void write_eval_csv(std::ostream& out, const TrainLog& log) {
  std::vector<std::string> header{"iteration"};
  for (const char* prefix : {"recall_", "precision_", "iou_"}) {
    for (int c = 0; c < log.num_classes; ++c) header.push_back(prefix + std::to_string(c));
  }
  header.emplace_back("mean_accuracy");
  header.emplace_back("mean_iou");
  write_csv_row(out, header);
  for (const auto& e : log.eval) {
    std::vector<std::string> row{std::to_string(e.iteration)};
    for (const auto* v : {&e.report.recall, &e.report.precision, &e.report.jaccard}) {
      for (const auto& x : *v) row.push_back(format_optional(x));
    }
    row.push_back(format_optional(e.report.mean_accuracy));
    row.push_back(format_optional(e.report.mean_iou));
    write_csv_row(out, row);
  }
}

void write_train_outputs(const TrainLog& log, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream f(base / "train.csv", std::ios::binary);
    write_train_csv(f, log);
  }
  {
    std::ofstream f(base / "eval.csv", std::ios::binary);
    write_eval_csv(f, log);
  }
  {
    std::ofstream f(base / "weights.csv", std::ios::binary);
    write_weight_trace_csv(f, log.weights);
  }
  save_checkpoint(log.final_params, (base / "checkpoint.bin").string());
}

}  // namespace reclab
