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

#include "reclab/cli/gradcheck.hpp"

namespace reclab::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidInput = 2,
  kExitNumerical = 3,
  kExitSweepFailed = 4,
};

// Each command writes progress to `out`, diagnostics to `err` and returns an
// exit code. `seed`, when set, overrides the seeds in the config.
int cmd_gen_data(const std::string& config_path, const std::string& out_path,
                 std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

// Writes train.csv, eval.csv, weights.csv and checkpoint.bin into out_dir.
// On a non-finite loss the last good checkpoint and the partial logs are
// still written.
int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

// Writes report.json and report.csv for a checkpoint on a dataset. The
// dataset is either a dataset file or a generator config.
int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::string& out_dir, std::ostream& out, std::ostream& err);

// One subdirectory per (label, seed) run plus summary.csv and scatter.svg.
// summary.csv holds a row per run and a seed="mean" row per label.
int cmd_sweep(const std::string& sweep_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);

int cmd_weights_plot(const std::string& weights_csv, const std::string& out_svg,
                     std::ostream& out, std::ostream& err);

int cmd_gradcheck(const GradcheckOptions& options, std::ostream& out, std::ostream& err);

}  // namespace reclab::cli
