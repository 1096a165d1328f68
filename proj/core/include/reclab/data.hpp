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
#include <utility>
#include <vector>

#include "reclab/numeric.hpp"

namespace reclab {

struct Dataset {
  Matrix features;  // N x D
  std::vector<int> labels;
  int num_classes = 0;
  // Samples per indivisible unit (1 for blobs, H*W pixels for a scene).
  // Batching and holdout splits never cut a group.
  std::size_t group_size = 1;
  // Canonical JSON of generator name, seed and parameters.
  std::string provenance;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const noexcept { return features.cols(); }
  std::size_t num_groups() const noexcept { return group_size ? size() / group_size : 0; }
  std::vector<std::int64_t> class_counts() const;

  bool operator==(const Dataset&) const = default;
};

struct BlobSpec {
  std::uint64_t seed = 1;
  std::vector<std::int64_t> counts;  // per class, each >= 1
  std::size_t dim = 2;
  double separation = 2.0;  // minimum distance between class centers
  double noise = 1.0;       // isotropic standard deviation
};

// Gaussian blobs at seeded random centers placed at least `separation`
// apart, with exactly counts[c] samples of class c. Throws GenerationError
// if the centers cannot be placed.
Dataset make_blobs(const BlobSpec& spec);

enum class ShapeKind { kBackground, kRect, kVLine, kBlob };

ShapeKind parse_shape_kind(std::string_view name);
std::string_view to_string(ShapeKind kind);

struct SceneClassSpec {
  std::string name;
  ShapeKind shape = ShapeKind::kRect;
  double frequency = 0.0;
  std::vector<double> embedding;
  double noise = 0.0;
};

struct SceneSpec {
  std::uint64_t seed = 1;
  std::size_t count = 50;
  std::size_t height = 32;
  std::size_t width = 32;
  std::vector<SceneClassSpec> classes;
  // Allowed relative deviation of the set-wide pixel frequency from each
  // target.
  double tolerance = 0.2;
};

struct SceneSet {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<SceneClassSpec> classes;
  std::vector<std::vector<int>> label_maps;  // row-major H*W per scene
  std::vector<Matrix> features;              // (H*W) x D per scene
  std::string provenance;
};

// Background fill plus filled rectangles, 1-pixel vertical lines and small
// discs. Classes are painted in order of decreasing frequency so rarer
// shapes overwrite larger ones. Throws GenerationError if the spec cannot
// be met within `tolerance`.
SceneSet make_scenes(const SceneSpec& spec);

// Five classes: road background, building rectangles, vegetation
// rectangles, pole lines and a rare bike-like blob class (0.4% of pixels)
// whose features overlap road's.
SceneSpec default_scene_spec(std::uint64_t seed = 1, std::size_t count = 50);

// Pixels flattened into samples, one group per scene.
Dataset scenes_to_dataset(const SceneSet& scenes);

// N_c / N per class. Throws InvalidInput on an empty label set.
std::vector<double> class_frequencies(std::span<const int> labels, int num_classes);

// Deterministic stratified split into (train, holdout). For grouped data the
// split is by group, stratified on the group's first label.
std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double holdout_fraction,
                                          std::uint64_t seed);

// File layout: 8-byte magic "RCLDSET1", little-endian u64 header length,
// JSON header {"format", "version", "n", "d", "classes", "group_size",
// "provenance"}, then N*D features and N labels as little-endian f64.
inline constexpr int kDatasetFormatVersion = 1;

std::string encode_dataset(const Dataset& ds);
Dataset decode_dataset(std::string_view bytes);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace reclab
