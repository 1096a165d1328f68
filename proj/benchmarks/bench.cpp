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

#include <benchmark/benchmark.h>

#include <vector>

#include "reclab/losses.hpp"
#include "reclab/metrics.hpp"
#include "reclab/model.hpp"
#include "reclab/numeric.hpp"
#include "reclab/random.hpp"

namespace {

using namespace reclab;

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  CounterRng rng(seed, 1);
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = rng.normal();
  return m;
}

std::vector<int> random_labels(std::size_t n, int c, std::uint64_t seed) {
  CounterRng rng(seed, 2);
  std::vector<int> y(n);
  for (int& v : y) v = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(c)));
  return y;
}

void BM_Softmax(benchmark::State& state) {
  const Matrix z = random_matrix(static_cast<std::size_t>(state.range(0)), 10, 1);
  for (auto _ : state) benchmark::DoNotOptimize(softmax(z));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Softmax)->Arg(64)->Arg(4096);

void BM_Loss(benchmark::State& state) {
  const LossKind kind = parse_loss_kind(loss_identifiers()[static_cast<std::size_t>(state.range(0))]);
  const Matrix z = random_matrix(1024, 5, 3);
  const std::vector<int> y = random_labels(1024, 5, 4);
  LossSpec spec;
  spec.kind = kind;
  const ClassWeights w = ClassWeights::uniform(5, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_loss(spec, z, y, w));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_Loss)->DenseRange(0, static_cast<int>(loss_identifiers().size()) - 1);

void BM_ForwardBackward(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const ModelParams p = init_model(1, Arch::kMlp, 3, 16, 5);
  const Matrix x = random_matrix(n, 3, 5);
  const std::vector<int> y = random_labels(n, 5, 6);
  for (auto _ : state) {
    const ForwardResult f = forward(p, x);
    const LossResult l = cross_entropy(f.logits, y);
    benchmark::DoNotOptimize(backward(p, f.cache, l.grad));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBackward)->Arg(64)->Arg(4096);

void BM_ConfusionMetrics(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::vector<int> y = random_labels(n, 5, 7), p = random_labels(n, 5, 8);
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_metrics(confusion_matrix(p, y, 5)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfusionMetrics)->Arg(1024)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
