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

#include "reclab/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "binary_io.hpp"
#include "reclab/error.hpp"
#include "reclab/random.hpp"

namespace reclab {

using nlohmann::json;

namespace {

constexpr std::string_view kDatasetMagic = "RCLDSET1";
constexpr std::uint64_t kBlobStream = 0x626C6F6273ULL;
constexpr std::uint64_t kLayoutStream = 0x6C61796F7574ULL;
constexpr std::uint64_t kPixelNoiseStream = 0x6E6F697365ULL;
constexpr std::uint64_t kSplitStream = 0x73706C6974ULL;
constexpr int kMaxCenterRetries = 10000;

}  // namespace

std::vector<std::int64_t> Dataset::class_counts() const {
  std::vector<std::int64_t> counts(num_classes, 0);
  for (int y : labels) ++counts.at(y);
  return counts;
}

Dataset make_blobs(const BlobSpec& spec) {
  const auto num_classes = spec.counts.size();
  if (num_classes < 2) throw InvalidInput("blobs need at least two classes");
  if (spec.dim < 1) throw InvalidInput("blob dimension must be >= 1");
  if (!(spec.separation > 0.0) || !(spec.noise > 0.0)) {
    throw InvalidInput("separation and noise must be positive");
  }
  for (auto n : spec.counts) {
    if (n < 1) throw InvalidInput("every blob class needs at least one sample");
  }

  CounterRng rng(spec.seed, kBlobStream);
  // Box side grows with the class count so the packing stays feasible.
  const double side = 1.5 * spec.separation *
                      std::max(1.0, std::pow(static_cast<double>(num_classes),
                                             1.0 / static_cast<double>(spec.dim)));
  std::vector<std::vector<double>> centers;
  for (std::size_t c = 0; c < num_classes; ++c) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxCenterRetries && !placed; ++attempt) {
      std::vector<double> cand(spec.dim);
      for (double& v : cand) v = rng.uniform(-side / 2.0, side / 2.0);
      placed = std::all_of(centers.begin(), centers.end(), [&](const auto& other) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < spec.dim; ++k) d2 += (cand[k] - other[k]) * (cand[k] - other[k]);
        return std::sqrt(d2) >= spec.separation;
      });
      if (placed) centers.push_back(std::move(cand));
    }
    if (!placed) {
      throw GenerationError("could not place blob center " + std::to_string(c) + " after " +
                            std::to_string(kMaxCenterRetries) + " attempts");
    }
  }

  const auto total = std::accumulate(spec.counts.begin(), spec.counts.end(), std::int64_t{0});
  Dataset ds;
  ds.num_classes = static_cast<int>(num_classes);
  ds.features = Matrix(static_cast<std::size_t>(total), spec.dim);
  ds.labels.reserve(static_cast<std::size_t>(total));
  std::size_t row = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    for (std::int64_t i = 0; i < spec.counts[c]; ++i, ++row) {
      for (std::size_t k = 0; k < spec.dim; ++k) {
        ds.features(row, k) = centers[c][k] + spec.noise * rng.normal();
      }
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  ds.provenance = json{{"generator", "blobs"},
                       {"seed", spec.seed},
                       {"counts", spec.counts},
                       {"dim", spec.dim},
                       {"separation", spec.separation},
                       {"noise", spec.noise}}
                      .dump();
  return ds;
}

ShapeKind parse_shape_kind(std::string_view name) {
  if (name == "background") return ShapeKind::kBackground;
  if (name == "rect") return ShapeKind::kRect;
  if (name == "vline") return ShapeKind::kVLine;
  if (name == "blob") return ShapeKind::kBlob;
  throw InvalidInput("unknown shape kind '" + std::string(name) +
                     "' (expected background, rect, vline or blob)");
}

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::kBackground: return "background";
    case ShapeKind::kRect: return "rect";
    case ShapeKind::kVLine: return "vline";
    case ShapeKind::kBlob: return "blob";
  }
  return "?";
}

namespace {

// Paints one shape of class `cls` and returns how many pixels changed to it.
std::int64_t paint_shape(std::vector<int>& map, std::size_t h, std::size_t w, ShapeKind kind,
                         int cls, CounterRng& rng) {
  std::int64_t changed = 0;
  auto set = [&](std::size_t r, std::size_t c) {
    int& px = map[r * w + c];
    if (px != cls) {
      px = cls;
      ++changed;
    }
  };
  switch (kind) {
    case ShapeKind::kRect: {
      const std::size_t rh = h / 8 + rng.uniform_int(h / 2 - h / 8 + 1);
      const std::size_t rw = w / 8 + rng.uniform_int(w / 2 - w / 8 + 1);
      const std::size_t top = rng.uniform_int(h - rh + 1);
      const std::size_t left = rng.uniform_int(w - rw + 1);
      for (std::size_t r = top; r < top + rh; ++r) {
        for (std::size_t c = left; c < left + rw; ++c) set(r, c);
      }
      break;
    }
    case ShapeKind::kVLine: {
      const std::size_t len = h / 4 + rng.uniform_int(h / 2 + 1);
      const std::size_t top = rng.uniform_int(h - len + 1);
      const std::size_t col = rng.uniform_int(w);
      for (std::size_t r = top; r < top + len; ++r) set(r, col);
      break;
    }
    case ShapeKind::kBlob: {
      const auto radius = static_cast<std::int64_t>(1 + rng.uniform_int(2));
      const auto cr = static_cast<std::int64_t>(rng.uniform_int(h));
      const auto cc = static_cast<std::int64_t>(rng.uniform_int(w));
      for (std::int64_t dr = -radius; dr <= radius; ++dr) {
        for (std::int64_t dc = -radius; dc <= radius; ++dc) {
          if (dr * dr + dc * dc > radius * radius) continue;
          const std::int64_t r = cr + dr;
          const std::int64_t c = cc + dc;
          if (r < 0 || c < 0 || r >= static_cast<std::int64_t>(h) ||
              c >= static_cast<std::int64_t>(w)) {
            continue;
          }
          set(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
      }
      break;
    }
    case ShapeKind::kBackground:
      break;
  }
  return changed;
}

json scene_spec_json(const SceneSpec& spec) {
  json classes = json::array();
  for (const auto& k : spec.classes) {
    classes.push_back({{"name", k.name},
                       {"shape", std::string(to_string(k.shape))},
                       {"frequency", k.frequency},
                       {"embedding", k.embedding},
                       {"noise", k.noise}});
  }
  return json{{"generator", "scenes"}, {"seed", spec.seed},
              {"count", spec.count},   {"height", spec.height},
              {"width", spec.width},   {"tolerance", spec.tolerance},
              {"classes", classes}};
}

}  // namespace

SceneSet make_scenes(const SceneSpec& spec) {
  const std::size_t n_cls = spec.classes.size();
  if (n_cls < 2) throw InvalidInput("scenes need at least two classes");
  if (spec.height < 8 || spec.width < 8) throw InvalidInput("scene height and width must be >= 8");
  if (spec.count < 1) throw InvalidInput("scene count must be >= 1");
  const std::size_t dim = spec.classes.front().embedding.size();
  if (dim < 1) throw InvalidInput("class embeddings must be non-empty");

  int background = -1;
  double freq_sum = 0.0;
  for (std::size_t c = 0; c < n_cls; ++c) {
    const auto& k = spec.classes[c];
    if (k.embedding.size() != dim) throw InvalidInput("class embeddings differ in length");
    if (!(k.noise >= 0.0)) throw InvalidInput("feature noise must be non-negative");
    if (!(k.frequency > 0.0)) {
      throw GenerationError("class '" + k.name + "' has non-positive target frequency");
    }
    freq_sum += k.frequency;
    if (k.shape == ShapeKind::kBackground) {
      if (background >= 0) throw GenerationError("more than one background class");
      background = static_cast<int>(c);
    }
  }
  if (background < 0) throw GenerationError("scene spec needs exactly one background class");
  if (std::abs(freq_sum - 1.0) > 1e-9) {
    throw GenerationError("target frequencies sum to " + std::to_string(freq_sum) + ", not 1");
  }

  // Painting order: decreasing frequency, declared order on ties.
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < n_cls; ++c) {
    if (static_cast<int>(c) != background) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return spec.classes[a].frequency > spec.classes[b].frequency;
  });

  // Coverage each class must paint so that, after later classes overwrite a
  // proportional share, the surviving fraction matches its target.
  std::vector<double> coverage(n_cls, 0.0);
  double survive = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    coverage[*it] = spec.classes[*it].frequency / survive;
    if (coverage[*it] >= 1.0) {
      throw GenerationError("class '" + spec.classes[*it].name +
                            "' cannot reach its target frequency");
    }
    survive *= 1.0 - coverage[*it];
  }

  const std::size_t h = spec.height;
  const std::size_t w = spec.width;
  const auto pixels = static_cast<double>(h * w);
  CounterRng layout(spec.seed, kLayoutStream);
  CounterRng noise(spec.seed, kPixelNoiseStream);

  SceneSet set;
  set.height = h;
  set.width = w;
  set.classes = spec.classes;
  std::vector<double> painted(n_cls, 0.0);
  for (std::size_t s = 0; s < spec.count; ++s) {
    std::vector<int> map(h * w, background);
    for (std::size_t c : order) {
      const double budget = coverage[c] * pixels * static_cast<double>(s + 1);
      // Bounded so a pathological spec cannot loop forever.
      for (int guard = 0; painted[c] < budget && guard < 10000; ++guard) {
        painted[c] += static_cast<double>(
            paint_shape(map, h, w, spec.classes[c].shape, static_cast<int>(c), layout));
      }
    }
    Matrix feat(h * w, dim);
    for (std::size_t p = 0; p < h * w; ++p) {
      const auto& k = spec.classes[map[p]];
      for (std::size_t j = 0; j < dim; ++j) {
        const double z = noise.normal();
        feat(p, j) = k.embedding[j] + k.noise * z;
      }
    }
    set.label_maps.push_back(std::move(map));
    set.features.push_back(std::move(feat));
  }

  std::vector<int> all_labels;
  all_labels.reserve(spec.count * h * w);
  for (const auto& m : set.label_maps) all_labels.insert(all_labels.end(), m.begin(), m.end());
  const auto freq = class_frequencies(all_labels, static_cast<int>(n_cls));
  for (std::size_t c = 0; c < n_cls; ++c) {
    const double target = spec.classes[c].frequency;
    if (std::abs(freq[c] - target) > spec.tolerance * target) {
      throw GenerationError("class '" + spec.classes[c].name + "' reached frequency " +
                            std::to_string(freq[c]) + ", target " + std::to_string(target) +
                            " (tolerance " + std::to_string(spec.tolerance) + " relative)");
    }
  }
  set.provenance = scene_spec_json(spec).dump();
  return set;
}

SceneSpec default_scene_spec(std::uint64_t seed, std::size_t count) {
  SceneSpec spec;
  spec.seed = seed;
  spec.count = count;
  spec.height = 32;
  spec.width = 32;
  // Large classes are well separated; only the rare blob class overlaps
  // (with road), so it is the one hard class.
  spec.classes = {
      {"road", ShapeKind::kBackground, 0.556, {0.0, 0.0, 0.0}, 0.6},
      {"building", ShapeKind::kRect, 0.28, {3.0, 0.0, 0.0}, 0.6},
      {"vegetation", ShapeKind::kRect, 0.11, {0.0, 3.0, 0.0}, 0.6},
      {"pole", ShapeKind::kVLine, 0.05, {0.0, 0.0, 3.0}, 0.6},
      {"bike", ShapeKind::kBlob, 0.004, {1.3, 1.3, 0.0}, 0.6},
  };
  return spec;
}

Dataset scenes_to_dataset(const SceneSet& scenes) {
  if (scenes.label_maps.empty()) throw InvalidInput("scene set is empty");
  const std::size_t per = scenes.height * scenes.width;
  const std::size_t dim = scenes.features.front().cols();
  Dataset ds;
  ds.num_classes = static_cast<int>(scenes.classes.size());
  ds.group_size = per;
  ds.features = Matrix(per * scenes.label_maps.size(), dim);
  ds.labels.reserve(per * scenes.label_maps.size());
  auto out = ds.features.flat();
  std::size_t off = 0;
  for (std::size_t s = 0; s < scenes.label_maps.size(); ++s) {
    ds.labels.insert(ds.labels.end(), scenes.label_maps[s].begin(), scenes.label_maps[s].end());
    auto src = scenes.features[s].flat();
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
    off += src.size();
  }
  ds.provenance = scenes.provenance;
  return ds;
}

std::vector<double> class_frequencies(std::span<const int> labels, int num_classes) {
  if (labels.empty()) throw InvalidInput("cannot compute frequencies of an empty label set");
  std::vector<std::int64_t> counts(num_classes, 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw InvalidInput("label out of range");
    ++counts[y];
  }
  std::vector<double> freq(num_classes);
  for (int c = 0; c < num_classes; ++c) {
    freq[c] = static_cast<double>(counts[c]) / static_cast<double>(labels.size());
  }
  return freq;
}

std::pair<Dataset, Dataset> split_holdout(const Dataset& ds, double holdout_fraction,
                                          std::uint64_t seed) {
  if (!(holdout_fraction > 0.0) || holdout_fraction >= 1.0) {
    throw InvalidInput("holdout fraction must lie in (0, 1)");
  }
  const std::size_t g = ds.group_size;
  const std::size_t groups = ds.num_groups();
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < groups; ++i) by_class[ds.labels[i * g]].push_back(i);

  CounterRng rng(seed, kSplitStream);
  std::vector<bool> held(groups, false);
  for (auto& [cls, members] : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    auto n_hold = static_cast<std::size_t>(
        std::llround(holdout_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_hold = std::clamp<std::size_t>(n_hold, 1, members.size() - 1);
    for (std::size_t i = 0; i < n_hold; ++i) held[members[i]] = true;
  }

  auto take = [&](bool want) {
    Dataset out;
    out.num_classes = ds.num_classes;
    out.group_size = g;
    out.provenance = ds.provenance;
    std::vector<double> feat;
    for (std::size_t i = 0; i < groups; ++i) {
      if (held[i] != want) continue;
      for (std::size_t r = i * g; r < (i + 1) * g; ++r) {
        auto row = ds.features.row(r);
        feat.insert(feat.end(), row.begin(), row.end());
        out.labels.push_back(ds.labels[r]);
      }
    }
    out.features = Matrix(out.labels.size(), ds.dim(), std::move(feat));
    return out;
  };
  return {take(false), take(true)};
}

std::string encode_dataset(const Dataset& ds) {
  json header{{"format", "reclab-dataset"},
              {"version", kDatasetFormatVersion},
              {"n", ds.size()},
              {"d", ds.dim()},
              {"classes", ds.num_classes},
              {"group_size", ds.group_size},
              {"provenance", ds.provenance.empty() ? json::object() : json::parse(ds.provenance)}};
  const std::string text = header.dump();
  detail::ByteWriter w;
  w.raw(kDatasetMagic);
  w.uint(static_cast<std::uint64_t>(text.size()));
  w.raw(text);
  for (double v : ds.features.flat()) w.f64(v);
  for (int y : ds.labels) w.f64(static_cast<double>(y));
  return w.bytes();
}

Dataset decode_dataset(std::string_view bytes) {
  detail::ByteReader r(bytes);
  if (r.raw(kDatasetMagic.size(), "magic") != kDatasetMagic) {
    throw FormatError("not a dataset file (bad magic)", 0);
  }
  const auto header_len = r.uint<std::uint64_t>("header length");
  const std::size_t header_off = r.offset();
  if (header_len > r.remaining()) throw FormatError("truncated file while reading header", header_off);
  const auto text = r.raw(static_cast<std::size_t>(header_len), "header");
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON header: ") + e.what(), header_off + e.byte);
  }
  if (!header.is_object() || !header.contains("version")) {
    throw FormatError("dataset header lacks a version field", header_off);
  }
  if (header["version"] != kDatasetFormatVersion) {
    throw VersionMismatch("dataset file version " + header["version"].dump() +
                          " is not supported (expected " +
                          std::to_string(kDatasetFormatVersion) + ")");
  }
  Dataset ds;
  std::size_t n = 0;
  std::size_t d = 0;
  try {
    n = header.at("n").get<std::size_t>();
    d = header.at("d").get<std::size_t>();
    ds.num_classes = header.at("classes").get<int>();
    ds.group_size = header.at("group_size").get<std::size_t>();
    const auto& prov = header.at("provenance");
    ds.provenance = prov.empty() ? std::string() : prov.dump();
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad dataset header: ") + e.what(), header_off);
  }
  if (ds.num_classes < 1 || ds.group_size < 1 || (n % ds.group_size) != 0) {
    throw FormatError("inconsistent dataset header", header_off);
  }
  if (d != 0 && n > r.remaining() / 8 / (d + 1)) {
    throw FormatError("truncated file: payload shorter than header declares", r.offset());
  }
  std::vector<double> feat(n * d);
  for (double& v : feat) v = r.f64("features");
  ds.features = Matrix(n, d, std::move(feat));
  ds.labels.resize(n);
  for (int& y : ds.labels) {
    const std::size_t off = r.offset();
    const double v = r.f64("labels");
    if (!(v >= 0.0) || v >= ds.num_classes || v != std::floor(v)) {
      throw FormatError("label value out of range", off);
    }
    y = static_cast<int>(v);
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes after payload", r.offset());
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
  detail::write_file_atomic(path, encode_dataset(ds));
}

Dataset load_dataset(const std::string& path) { return decode_dataset(detail::read_file(path)); }

}  // namespace reclab
