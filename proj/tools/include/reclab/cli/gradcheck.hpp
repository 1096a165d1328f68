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
#include <string>
#include <vector>

namespace reclab::cli {

struct GradcheckOptions {
  std::vector<std::uint64_t> seeds = {1, 2, 3};
  double tolerance = 1e-4;
  // Scales every analytic gradient by (1 + perturbation). Nonzero values
  // exist to prove the suite can fail.
  double perturbation = 0.0;
};

struct GradcheckRow {
  std::string loss;
  std::string model;  // logits, linear, mlp-relu, mlp-tanh
  int num_classes = 0;
  int batch_size = 0;
  double max_rel_error = 0.0;  // max over seeds
  double tolerance = 0.0;
  bool passed() const noexcept { return max_rel_error <= tolerance; }
};

struct IdentityRow {
  std::string check;
  int num_classes = 0;
  int batches = 0;
  double max_abs_error = 0.0;
  double tolerance = 0.0;
  bool passed() const noexcept { return max_abs_error <= tolerance; }
};

struct GradcheckReport {
  std::vector<GradcheckRow> gradients;
  std::vector<IdentityRow> identities;
  bool passed() const noexcept;
};

inline constexpr double kIdentityTolerance = 1e-10;
inline constexpr double kKinkMargin = 1e-3;

// Gradient rows for every (loss variant, model, C in {2,5}, N in {1,8,32}).
// Cross-entropy-family rows use tolerance / 10.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

void print_gradcheck_report(std::ostream& out, const GradcheckReport& report);

}  // namespace reclab::cli
