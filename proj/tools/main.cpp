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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "reclab/cli/commands.hpp"
#include "reclab/losses.hpp"

namespace {

std::string valid_losses() {
  std::string s;
  for (const auto& id : reclab::loss_identifiers()) s += (s.empty() ? "" : ", ") + id;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace reclab::cli;
  CLI::App app{"reclab: class-imbalance loss experiments"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string out_path;
  std::string config_path;
  app.add_option("--seed", seed, "override the seed in the config")->configurable(false);
  app.add_option("--out", out_path, "output file or directory");
  app.add_option("--config", config_path, "JSON config file");

  auto* gen = app.add_subcommand("gen-data", "generate a dataset file from a generator config");
  gen->fallthrough();

  auto* train = app.add_subcommand("train", "train a model and write logs and a checkpoint");
  train->fallthrough();
  train->footer("loss ids: " + valid_losses());

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  eval->fallthrough();
  std::string checkpoint, data;
  eval->add_option("--checkpoint", checkpoint, "checkpoint.bin")->required();
  eval->add_option("--data", data, "dataset file or generator config (.json)")->required();

  auto* sweep = app.add_subcommand("sweep", "train every loss in a sweep spec over its seeds");
  sweep->fallthrough();

  auto* plot = app.add_subcommand("weights-plot", "plot a weights.csv trace as SVG");
  plot->fallthrough();
  std::string weights_csv;
  plot->add_option("--input", weights_csv, "weights.csv")->required();

  auto* grad = app.add_subcommand("gradcheck", "run the gradient and identity checks");
  grad->fallthrough();
  GradcheckOptions gopts;
  std::vector<std::uint64_t> seeds;
  grad->add_option("--seeds", seeds, "seeds (default 1 2 3)");
  grad->add_option("--tolerance", gopts.tolerance, "max relative error")->check(CLI::PositiveNumber);
  grad->add_option("--perturbation", gopts.perturbation, "scale analytic gradients by 1+p");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  auto need = [](const std::string& v, const char* flag) {
    if (v.empty()) {
      std::cerr << "error: " << flag << " is required\n";
      return false;
    }
    return true;
  };

  if (*gen) {
    if (!need(config_path, "--config") || !need(out_path, "--out")) return kExitInvalidInput;
    return cmd_gen_data(config_path, out_path, seed, std::cout, std::cerr);
  }
  if (*train) {
    if (!need(config_path, "--config") || !need(out_path, "--out")) return kExitInvalidInput;
    return cmd_train(config_path, out_path, seed, std::cout, std::cerr);
  }
  if (*eval) {
    if (!need(out_path, "--out")) return kExitInvalidInput;
    return cmd_eval(checkpoint, data, out_path, std::cout, std::cerr);
  }
  if (*sweep) {
    if (!need(config_path, "--config") || !need(out_path, "--out")) return kExitInvalidInput;
    return cmd_sweep(config_path, out_path, seed, std::cout, std::cerr);
  }
  if (*plot) {
    if (!need(out_path, "--out")) return kExitInvalidInput;
    return cmd_weights_plot(weights_csv, out_path, std::cout, std::cerr);
  }
  if (*grad) {
    if (!seeds.empty()) gopts.seeds = seeds;
    else if (seed) gopts.seeds = {*seed};
    return cmd_gradcheck(gopts, std::cout, std::cerr);
  }
  return kExitInvalidInput;
}
