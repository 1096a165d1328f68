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

#include "reclab/cli/config.hpp"

#include <filesystem>
#include <set>

#include <json.hpp>

#include "reclab/error.hpp"

namespace reclab::cli {

using nlohmann::json;

namespace {

// Reads fields of one JSON object and rejects any key it was not asked
// about.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw InvalidInput(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return as<T>(key);
  }

  template <typename T>
  T require(const std::string& key) {
    if (!has(key)) throw InvalidInput(where_ + ": missing required key '" + key + "'");
    return as<T>(key);
  }

  const json& sub(const std::string& key) {
    if (!has(key)) throw InvalidInput(where_ + ": missing required key '" + key + "'");
    return obj_.at(key);
  }

  std::string path(const std::string& key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw InvalidInput(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  template <typename T>
  T as(const std::string& key) {
    const json& v = obj_.at(key);
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw InvalidInput("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw InvalidInput("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && v.get<std::int64_t>() < 0) throw InvalidInput("");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw InvalidInput("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw InvalidInput(where_ + ": key '" + key + "' has the wrong type");
    }
  }

  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("malformed JSON: ") + e.what());
  }
}

void check_version(Fields& f) {
  if (!f.has("version")) throw InvalidInput("config: missing top-level 'version'");
  const int v = f.require<int>("version");
  if (v != kConfigVersion) {
    throw InvalidInput("config: version " + std::to_string(v) + " is not supported (expected " +
                       std::to_string(kConfigVersion) + ")");
  }
}

template <typename T>
std::vector<T> number_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw InvalidInput(where + ": expected an array");
  std::vector<T> out;
  for (const auto& x : j) {
    if (!x.is_number()) throw InvalidInput(where + ": expected numbers");
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) throw InvalidInput(where + ": expected integers");
    }
    out.push_back(x.get<T>());
  }
  return out;
}

BlobSpec parse_blobs(Fields& f) {
  BlobSpec b;
  b.seed = f.get<std::uint64_t>("seed", b.seed);
  b.counts = number_array<std::int64_t>(f.sub("counts"), f.path("counts"));
  b.dim = f.get<std::size_t>("dim", b.dim);
  b.separation = f.get<double>("separation", b.separation);
  b.noise = f.get<double>("noise", b.noise);
  return b;
}

SceneSpec parse_scenes(Fields& f) {
  SceneSpec s = default_scene_spec();
  s.seed = f.get<std::uint64_t>("seed", s.seed);
  s.count = f.get<std::size_t>("count", s.count);
  s.height = f.get<std::size_t>("height", s.height);
  s.width = f.get<std::size_t>("width", s.width);
  s.tolerance = f.get<double>("tolerance", s.tolerance);
  if (f.has("classes")) {
    const json& arr = f.sub("classes");
    if (!arr.is_array()) throw InvalidInput(f.path("classes") + ": expected an array");
    s.classes.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Fields k(arr[i], f.path("classes[" + std::to_string(i) + "]"));
      SceneClassSpec c;
      c.name = k.get<std::string>("name", "class" + std::to_string(i));
      c.shape = parse_shape_kind(k.require<std::string>("shape"));
      c.frequency = k.require<double>("frequency");
      c.embedding = number_array<double>(k.sub("embedding"), k.path("embedding"));
      c.noise = k.get<double>("noise", 0.0);
      k.finish();
      s.classes.push_back(std::move(c));
    }
  }
  return s;
}

GeneratorSpec parse_generator_fields(Fields& f) {
  const auto gen = f.require<std::string>("generator");
  if (gen == "blobs") return parse_blobs(f);
  if (gen == "scenes") return parse_scenes(f);
  throw InvalidInput("unknown generator '" + gen + "' (expected blobs or scenes)");
}

DataSource parse_data_source(const json& j, const std::string& where, const std::string& base_dir) {
  Fields f(j, where);
  DataSource src;
  if (f.has("path")) {
    std::filesystem::path p(f.require<std::string>("path"));
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    src = p.string();
  } else {
    src = std::visit([](auto&& s) -> DataSource { return s; }, parse_generator_fields(f));
  }
  f.finish();
  return src;
}

void parse_loss_fields(Fields& f, LossSpec& loss) {
  if (f.has("id")) loss.kind = parse_loss_kind(f.require<std::string>("id"));
  loss.gamma = f.get<double>("gamma", loss.gamma);
  loss.keep_fraction = f.get<double>("keep_fraction", loss.keep_fraction);
  loss.alpha = f.get<double>("alpha", loss.alpha);
  loss.beta = f.get<double>("beta", loss.beta);
  loss.epsilon = f.get<double>("epsilon", loss.epsilon);
  loss.smoothing = f.get<double>("smoothing", loss.smoothing);
  loss.balanced_beta = f.get<double>("balanced_beta", loss.balanced_beta);
}

TrainConfig parse_train_fields(Fields& f, const std::string& base_dir) {
  TrainConfig cfg;
  cfg.data = parse_data_source(f.sub("data"), f.path("data"), base_dir);
  if (f.has("eval_data")) {
    cfg.eval_data = parse_data_source(f.sub("eval_data"), f.path("eval_data"), base_dir);
  }
  cfg.holdout_fraction = f.get<double>("holdout_fraction", cfg.holdout_fraction);
  if (f.has("model")) {
    Fields m(f.sub("model"), f.path("model"));
    cfg.model.arch = parse_arch(m.get<std::string>("arch", "linear"));
    cfg.model.hidden = m.get<std::size_t>("hidden", cfg.model.hidden);
    cfg.model.activation = parse_activation(m.get<std::string>("activation", "relu"));
    cfg.model.seed = m.get<std::uint64_t>("seed", cfg.model.seed);
    m.finish();
  }
  if (f.has("loss")) {
    Fields l(f.sub("loss"), f.path("loss"));
    parse_loss_fields(l, cfg.loss);
    l.finish();
  }
  if (f.has("optimizer")) {
    Fields o(f.sub("optimizer"), f.path("optimizer"));
    cfg.optimizer.kind = parse_optimizer_kind(o.get<std::string>("kind", "adam"));
    cfg.optimizer.learning_rate = o.get<double>("lr", cfg.optimizer.learning_rate);
    cfg.optimizer.beta1 = o.get<double>("beta1", cfg.optimizer.beta1);
    cfg.optimizer.beta2 = o.get<double>("beta2", cfg.optimizer.beta2);
    cfg.optimizer.epsilon = o.get<double>("epsilon", cfg.optimizer.epsilon);
    o.finish();
  }
  cfg.batch_size = f.get<std::size_t>("batch_size", cfg.batch_size);
  cfg.iterations = f.get<std::int64_t>("iterations", cfg.iterations);
  cfg.eval_interval = f.get<std::int64_t>("eval_interval", cfg.eval_interval);
  cfg.trace_gamma = f.get<double>("trace_gamma", cfg.trace_gamma);
  cfg.seed = f.get<std::uint64_t>("seed", cfg.seed);
  validate(cfg);
  return cfg;
}

}  // namespace

GeneratorSpec parse_generator_config(const std::string& json_text) {
  const json j = parse_json(json_text);
  Fields f(j, "config");
  check_version(f);
  GeneratorSpec spec = parse_generator_fields(f);
  f.finish();
  return spec;
}

TrainConfig parse_train_config(const std::string& json_text, const std::string& base_dir) {
  const json j = parse_json(json_text);
  Fields f(j, "config");
  check_version(f);
  TrainConfig cfg = parse_train_fields(f, base_dir);
  f.finish();
  return cfg;
}

SweepSpec parse_sweep_spec(const std::string& json_text, const std::string& base_dir) {
  const json j = parse_json(json_text);
  Fields f(j, "sweep");
  check_version(f);
  SweepSpec spec;
  {
    Fields b(f.sub("base"), f.path("base"));
    spec.base = parse_train_fields(b, base_dir);
    b.finish();
  }
  const json& runs = f.sub("runs");
  if (!runs.is_array() || runs.empty()) throw InvalidInput("sweep.runs: need at least one run");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Fields r(runs[i], f.path("runs[" + std::to_string(i) + "]"));
    SweepRun run;
    run.loss = spec.base.loss;
    Fields l(r.sub("loss"), r.path("loss"));
    if (!l.has("id")) throw InvalidInput(r.path("loss") + ": missing 'id'");
    parse_loss_fields(l, run.loss);
    l.finish();
    run.label = r.get<std::string>("label", std::string(to_string(run.loss.kind)));
    r.finish();
    spec.runs.push_back(std::move(run));
  }
  if (f.has("seeds")) {
    spec.seeds = number_array<std::uint64_t>(f.sub("seeds"), f.path("seeds"));
  } else {
    spec.seeds = {spec.base.seed};
  }
  if (spec.seeds.empty()) throw InvalidInput("sweep.seeds: need at least one seed");
  f.finish();
  std::set<std::string> labels;
  for (const auto& r : spec.runs) {
    if (!labels.insert(r.label).second) throw InvalidInput("duplicate sweep label '" + r.label + "'");
  }
  return spec;
}

void apply_seed(TrainConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.model.seed = seed;
  auto reseed = [seed](DataSource& src) {
    if (auto* b = std::get_if<BlobSpec>(&src)) b->seed = seed;
    if (auto* s = std::get_if<SceneSpec>(&src)) s->seed = seed;
  };
  reseed(config.data);
  if (config.eval_data) reseed(*config.eval_data);
}

Dataset generate(const GeneratorSpec& spec) {
  return std::visit(
      [](const auto& s) -> Dataset {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BlobSpec>) {
          return make_blobs(s);
        } else {
          return scenes_to_dataset(make_scenes(s));
        }
      },
      spec);
}

}  // namespace reclab::cli
