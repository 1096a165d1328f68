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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "reclab/data.hpp"
#include "reclab/error.hpp"
#include "test_util.hpp"

namespace reclab {
namespace {

TEST(Blobs, ExactCountsAndFrequencies) {
  BlobSpec spec;
  spec.counts = {950, 50};
  const Dataset ds = make_blobs(spec);
  EXPECT_EQ(ds.size(), 1000u);
  EXPECT_EQ(ds.class_counts(), (std::vector<std::int64_t>{950, 50}));
  const auto f = class_frequencies(ds.labels, 2);
  EXPECT_EQ(f[0], 0.95);
  EXPECT_EQ(f[1], 0.05);
}

TEST(Blobs, FrequenciesAreCountsOverN) {
  BlobSpec spec;
  spec.counts = {7, 13, 1, 29};
  spec.dim = 3;
  const Dataset ds = make_blobs(spec);
  const auto f = class_frequencies(ds.labels, 4);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(f[c], static_cast<double>(spec.counts[c]) / 50.0);
}

TEST(Blobs, SameSeedSameBytes) {
  BlobSpec spec;
  spec.counts = {30, 5, 8};
  spec.seed = 17;
  EXPECT_EQ(encode_dataset(make_blobs(spec)), encode_dataset(make_blobs(spec)));
  BlobSpec other = spec;
  other.seed = 18;
  EXPECT_NE(encode_dataset(make_blobs(spec)), encode_dataset(make_blobs(other)));
}

TEST(Blobs, ProvenanceRegenerates) {
  BlobSpec spec;
  spec.counts = {20, 4};
  spec.seed = 9;
  spec.separation = 3.25;
  const Dataset ds = make_blobs(spec);
  const auto prov = nlohmann::json::parse(ds.provenance);
  EXPECT_EQ(prov["generator"], "blobs");
  BlobSpec again;
  again.seed = prov["seed"].get<std::uint64_t>();
  again.counts = prov["counts"].get<std::vector<std::int64_t>>();
  again.dim = prov["dim"].get<std::size_t>();
  again.separation = prov["separation"].get<double>();
  again.noise = prov["noise"].get<double>();
  EXPECT_EQ(make_blobs(again), ds);
}

TEST(Blobs, CentersRespectSeparation) {
  BlobSpec spec;
  spec.counts = {200, 200, 200};
  spec.noise = 1e-3;
  spec.separation = 5.0;
  const Dataset ds = make_blobs(spec);
  std::vector<std::vector<double>> mean(3, std::vector<double>(2, 0.0));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t k = 0; k < 2; ++k) mean[static_cast<std::size_t>(ds.labels[i])][k] += ds.features(i, k) / 200.0;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) {
      const double d = std::hypot(mean[static_cast<std::size_t>(a)][0] - mean[static_cast<std::size_t>(b)][0],
                                  mean[static_cast<std::size_t>(a)][1] - mean[static_cast<std::size_t>(b)][1]);
      EXPECT_GE(d, 5.0 - 1e-3);
    }
  }
}

TEST(Blobs, InvalidSpecs) {
  BlobSpec spec;
  spec.counts = {10};
  EXPECT_THROW(make_blobs(spec), InvalidInput);
  spec.counts = {10, 0};
  EXPECT_THROW(make_blobs(spec), InvalidInput);
  spec.counts = {10, 10};
  spec.noise = 0.0;
  EXPECT_THROW(make_blobs(spec), InvalidInput);
}

TEST(Scenes, DefaultSpecMeetsFrequencies) {
  const SceneSet set = make_scenes(default_scene_spec(3, 50));
  const Dataset ds = scenes_to_dataset(set);
  EXPECT_EQ(ds.group_size, 32u * 32u);
  EXPECT_EQ(ds.size(), 50u * 32 * 32);
  const auto f = class_frequencies(ds.labels, 5);
  for (std::size_t c = 0; c < 5; ++c) {
    EXPECT_NEAR(f[c], set.classes[c].frequency, 0.2 * set.classes[c].frequency) << set.classes[c].name;
  }
  EXPECT_LE(set.classes[4].frequency, 0.005);
}

TEST(Scenes, VeryRareBlobClass) {
  SceneSpec spec = default_scene_spec(5, 60);
  spec.classes[0].frequency += spec.classes[4].frequency - 0.001;
  spec.classes[4].frequency = 0.001;
  const Dataset ds = scenes_to_dataset(make_scenes(spec));
  const auto f = class_frequencies(ds.labels, 5);
  EXPECT_NEAR(f[4], 0.001, 0.0002);
}

TEST(Scenes, NoiselessFeaturesIdentifyClass) {
  SceneSpec spec = default_scene_spec(2, 50);
  for (auto& c : spec.classes) c.noise = 0.0;
  const SceneSet set = make_scenes(spec);
  const Dataset ds = scenes_to_dataset(set);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    int best = -1;
    double best_d = HUGE_VAL;
    for (std::size_t c = 0; c < set.classes.size(); ++c) {
      double d = 0.0;
      for (std::size_t k = 0; k < ds.dim(); ++k) {
        const double diff = ds.features(i, k) - set.classes[c].embedding[k];
        d += diff * diff;
      }
      if (d < best_d) best_d = d, best = static_cast<int>(c);
    }
    correct += best == ds.labels[i];
  }
  EXPECT_EQ(correct, ds.size());
}

TEST(Scenes, ShapesHaveExpectedGeometry) {
  const SceneSet set = make_scenes(default_scene_spec(4, 50));
  // Pole pixels form 1-pixel-wide vertical runs: a pole pixel's horizontal
  // neighbours are never both pole.
  std::size_t pole = 0, wide = 0;
  for (const auto& m : set.label_maps) {
    for (std::size_t r = 0; r < set.height; ++r) {
      for (std::size_t c = 1; c + 1 < set.width; ++c) {
        if (m[r * set.width + c] != 3) continue;
        ++pole;
        wide += m[r * set.width + c - 1] == 3 && m[r * set.width + c + 1] == 3;
      }
    }
  }
  EXPECT_GT(pole, 0u);
  EXPECT_LT(static_cast<double>(wide), 0.05 * static_cast<double>(pole));
}

TEST(Scenes, DeterministicAndSeedSensitive) {
  EXPECT_EQ(encode_dataset(scenes_to_dataset(make_scenes(default_scene_spec(1, 50)))),
            encode_dataset(scenes_to_dataset(make_scenes(default_scene_spec(1, 50)))));
  EXPECT_NE(make_scenes(default_scene_spec(1, 50)).label_maps,
            make_scenes(default_scene_spec(2, 50)).label_maps);
}

TEST(Scenes, InvalidSpecs) {
  SceneSpec spec = default_scene_spec(1, 50);
  spec.classes[0].frequency += 0.1;
  EXPECT_THROW(make_scenes(spec), GenerationError);
  spec = default_scene_spec(1, 50);
  spec.height = 4;
  EXPECT_THROW(make_scenes(spec), InvalidInput);
  spec = default_scene_spec(1, 2);
  // Two small scenes cannot host a 0.4% class within 20%.
  spec.height = spec.width = 8;
  EXPECT_THROW(make_scenes(spec), GenerationError);
}

TEST(ClassFrequencies, Examples) {
  const std::vector<int> a{0, 0, 0, 1};
  EXPECT_EQ(class_frequencies(a, 2), (std::vector<double>{0.75, 0.25}));
  const std::vector<int> u{0, 1, 2, 3, 0, 1, 2, 3};
  for (double f : class_frequencies(u, 4)) EXPECT_EQ(f, 0.25);
  EXPECT_THROW(class_frequencies(std::vector<int>{}, 2), InvalidInput);
  EXPECT_THROW(class_frequencies(std::vector<int>{2}, 2), InvalidInput);
}

TEST(ClassFrequencies, SumToOneAsRationals) {
  // Integer counts always sum to N, so the frequencies are exact ratios.
  const auto y = testing::random_labels(3, 97, 6);
  const auto counts = testing::counts_of(y, 6);
  const auto f = class_frequencies(y, 6);
  std::int64_t total = 0;
  for (std::size_t c = 0; c < 6; ++c) {
    EXPECT_EQ(f[c], static_cast<double>(counts[c]) / 97.0);
    total += counts[c];
  }
  EXPECT_EQ(total, 97);
}

TEST(Holdout, StratifiedAndDisjoint) {
  BlobSpec spec;
  spec.counts = {95, 5};
  const Dataset ds = make_blobs(spec);
  const auto [train, hold] = split_holdout(ds, 0.2, 1);
  EXPECT_EQ(train.size() + hold.size(), 100u);
  EXPECT_EQ(hold.class_counts(), (std::vector<std::int64_t>{19, 1}));
  EXPECT_EQ(split_holdout(ds, 0.2, 1).second, hold);
  EXPECT_THROW(split_holdout(ds, 1.0, 1), InvalidInput);
}

TEST(Holdout, KeepsScenesWhole) {
  const Dataset ds = scenes_to_dataset(make_scenes(default_scene_spec(1, 50)));
  const auto [train, hold] = split_holdout(ds, 0.2, 1);
  EXPECT_EQ(hold.size() % ds.group_size, 0u);
  EXPECT_EQ(hold.num_groups(), 10u);
}

TEST(DatasetFile, RoundTrip) {
  const auto dir = testing::scratch_dir("dsfile");
  BlobSpec spec;
  spec.counts = {12, 3};
  const Dataset ds = make_blobs(spec);
  const auto path = (dir / "d.bin").string();
  save_dataset(ds, path);
  EXPECT_EQ(load_dataset(path), ds);
  const Dataset sc = scenes_to_dataset(make_scenes(default_scene_spec(1, 50)));
  save_dataset(sc, path);
  EXPECT_EQ(load_dataset(path), sc);
}

TEST(DatasetFile, TruncationIsFormatError) {
  BlobSpec spec;
  spec.counts = {12, 3};
  const std::string bytes = encode_dataset(make_blobs(spec));
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{12}, std::size_t{40}, bytes.size() - 1}) {
    EXPECT_THROW(decode_dataset(std::string_view(bytes).substr(0, cut)), FormatError) << cut;
  }
  try {
    decode_dataset(std::string_view(bytes).substr(0, bytes.size() - 4));
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_GT(e.offset(), 0u);
  }
}

TEST(DatasetFile, OtherVersionIsMismatch) {
  BlobSpec spec;
  spec.counts = {12, 3};
  std::string bytes = encode_dataset(make_blobs(spec));
  const auto pos = bytes.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos + 10] = '2';
  EXPECT_THROW(decode_dataset(bytes), VersionMismatch);
}

TEST(DatasetFile, BadMagic) {
  EXPECT_THROW(decode_dataset("NOTADATASETFILE!"), FormatError);
}

}  // namespace
}  // namespace reclab
