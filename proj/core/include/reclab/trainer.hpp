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
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "reclab/data.hpp"
#include "reclab/error.hpp"
#include "reclab/losses.hpp"
#include "reclab/metrics.hpp"
#include "reclab/model.hpp"
#include "reclab/optimizer.hpp"
#include "reclab/recall_dynamics.hpp"

namespace reclab {

// Where training data comes from: a dataset file or an inline generator.
using DataSource = std::variant<std::string, BlobSpec, SceneSpec>;

Dataset materialize(const DataSource& source);

struct ModelSpec {
  Arch arch = Arch::kLinear;
  std::size_t hidden = 16;
  Activation activation = Activation::kRelu;
  std::uint64_t seed = 1;
};

struct TrainConfig {
  DataSource data = BlobSpec{};
  // When absent, `holdout_fraction` of `data` is split off for evaluation.
  std::optional<DataSource> eval_data;
  double holdout_fraction = 0.2;

  ModelSpec model;
  LossSpec loss;
  OptimizerConfig optimizer;

  // Measured in groups: samples for flat data, whole scenes for scene sets.
  std::size_t batch_size = 64;
  std::int64_t iterations = 1000;
  std::int64_t eval_interval = 100;
  // Focal exponent used for the weight trace (independent of the loss).
  double trace_gamma = 1.0;
  std::uint64_t seed = 1;
};

// Throws InvalidInput on out-of-range settings.
void validate(const TrainConfig& config);

struct TrainRecord {
  std::int64_t iteration = 0;
  double loss = 0.0;  // loss value divided by the batch sample count
  PartialWeights batch_recall;
};

struct EvalRecord {
  std::int64_t iteration = 0;
  MetricsReport report;
};

struct TrainLog {
  int num_classes = 0;
  std::vector<TrainRecord> train;
  std::vector<EvalRecord> eval;
  WeightTrace weights;
  ModelParams final_params;
};

// Training hit a non-finite loss or gradient. Carries the parameters from
// the last completed step and the log up to that point.
class TrainingAborted : public NumericalError {
 public:
  TrainingAborted(const std::string& what, ModelParams last_good, TrainLog partial)
      : NumericalError(what), last_good_(std::move(last_good)), partial_(std::move(partial)) {}
  const ModelParams& last_good() const noexcept { return last_good_; }
  const TrainLog& partial_log() const noexcept { return partial_; }

 private:
  ModelParams last_good_;
  TrainLog partial_;
};

// The datasets used for training and evaluation under `config`.
std::pair<Dataset, Dataset> resolve_datasets(const TrainConfig& config);

TrainLog train(const TrainConfig& config);
TrainLog train(const TrainConfig& config, const Dataset& train_data, const Dataset& eval_data);

// Argmax predictions over the whole dataset, scored by aggregate_metrics.
MetricsReport evaluate(const ModelParams& params, const Dataset& data);
ConfusionMatrix predict_confusion(const ModelParams& params, const Dataset& data);

// train.csv: iteration, loss, recall_<c>...
void write_train_csv(std::ostream& out, const TrainLog& log);
// eval.csv: iteration, recall_<c>..., precision_<c>..., iou_<c>...,
// mean_accuracy, mean_iou
void write_eval_csv(std::ostream& out, const TrainLog& log);

// Writes train.csv, eval.csv, weights.csv and checkpoint.bin into `dir`
// (created if missing).
void write_train_outputs(const TrainLog& log, const std::string& dir);

}  // namespace reclab
