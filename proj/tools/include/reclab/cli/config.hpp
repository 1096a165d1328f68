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
#include <string>
#include <vector>

#include "reclab/data.hpp"
#include "reclab/trainer.hpp"

namespace reclab::cli {

// Every config file carries this in its top-level "version" field.
inline constexpr int kConfigVersion = 1;

// A dataset generator config: blobs or scenes.
using GeneratorSpec = std::variant<BlobSpec, SceneSpec>;

// Parsers reject unknown keys, wrong types and a missing or unsupported
// version with InvalidInput. `base_dir` resolves relative dataset paths.
GeneratorSpec parse_generator_config(const std::string& json_text);
TrainConfig parse_train_config(const std::string& json_text, const std::string& base_dir = ".");

struct SweepRun {
  std::string label;
  LossSpec loss;
};

struct SweepSpec {
  TrainConfig base;
  std::vector<SweepRun> runs;
  std::vector<std::uint64_t> seeds;
};

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir = ".");

// Sets the run seed, the model seed and (for inline generators) the data
// seed.
void apply_seed(TrainConfig& config, std::uint64_t seed);

Dataset generate(const GeneratorSpec& spec);

}  // namespace reclab::cli
