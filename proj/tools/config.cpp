// Copyright 2026 The Lawforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config.hpp"

#include <fstream>
#include <set>
#include <thread>

#include "lawforge/error.hpp"

#ifndef LAWFORGE_DEFAULT_DATA_DIR
#define LAWFORGE_DEFAULT_DATA_DIR "data"
#endif

namespace lawforge::cli {

namespace {

using nlohmann::json;

// Reads fields out of a JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& doc, fs::path base) : doc_(doc), base_(std::move(base)) {
    if (!doc_.is_object()) throw ConfigError("configuration must be a JSON object");
  }

  template <class F>
  void section(const std::string& name, F&& body) {
    seen_sections_.insert(name);
    auto it = doc_.find(name);
    if (it == doc_.end()) return;
    if (!it->is_object()) throw ConfigError("config section '" + name + "' must be an object");
    current_ = &*it;
    name_ = name;
    keys_.clear();
    body();
    for (const auto& [k, v] : current_->items()) {
      if (!keys_.count(k)) throw ConfigError("unknown config key '" + name + "." + k + "'");
    }
    current_ = nullptr;
  }

  void field(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, "a number");
      out = v->get<double>();
    }
  }
  void field(const std::string& key, std::size_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) fail(key, "a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void field(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, "a boolean");
      out = v->get<bool>();
    }
  }
  void field(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a string");
      out = v->get<std::string>();
    }
  }
  void field(const std::string& key, fs::path& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, "a path string");
      out = resolve(v->get<std::string>());
    }
  }
  void field(const std::string& key, std::optional<fs::path>& out) {
    if (const json* v = find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_string()) fail(key, "a path string or null");
      out = resolve(v->get<std::string>());
    }
  }
  void field(const std::string& key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      if (!v->is_array()) fail(key, "an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_unsigned()) fail(key, "an array of integers");
        out.push_back(e.get<std::size_t>());
      }
    }
  }
  void field(const std::string& key, sim::TestMode& out) {
    std::string s;
    if (find(key)) {
      field(key, s);
      try {
        out = parse_mode(s);
      } catch (const ConfigError&) {
        fail(key, "\"coverage\" or \"counting\"");
      }
    }
  }

  void finish() const {
    for (const auto& [k, v] : doc_.items()) {
      if (k != "schema_version" && !seen_sections_.count(k)) {
        throw ConfigError("unknown config section '" + k + "'");
      }
    }
  }

 private:
  const json* find(const std::string& key) {
    keys_.insert(key);
    auto it = current_->find(key);
    return it == current_->end() ? nullptr : &*it;
  }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError("config key '" + name_ + "." + key + "' must be " + what);
  }
  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    return path.is_absolute() ? path : (base_ / path).lexically_normal();
  }

  const json& doc_;
  fs::path base_;
  const json* current_ = nullptr;
  std::string name_;
  std::set<std::string> keys_;
  std::set<std::string> seen_sections_;
};

// Mirror of Reader that writes every field.
class Writer {
 public:
  template <class F>
  void section(const std::string& name, F&& body) {
    current_ = &doc_[name];
    *current_ = json::object();
    body();
  }
  template <class T>
  void field(const std::string& key, const T& v) {
    (*current_)[key] = v;
  }
  void field(const std::string& key, const fs::path& v) { (*current_)[key] = v.string(); }
  void field(const std::string& key, const std::optional<fs::path>& v) {
    (*current_)[key] = v ? json(v->string()) : json();
  }
  void field(const std::string& key, const sim::TestMode& v) { (*current_)[key] = mode_name(v); }
  json take() { return std::move(doc_); }

 private:
  json doc_ = json::object();
  json* current_ = nullptr;
};

template <class Cfg, class V>
void visit(Cfg& c, V& v) {
  v.section("run", [&] {
    v.field("seed", c.seed);
    v.field("road", c.road);
    v.field("threads", c.threads);
    v.field("output_dir", c.output_dir);
  });
  v.section("paths", [&] {
    v.field("laws", c.laws);
    v.field("roads", c.roads);
  });
  v.section("weighting", [&] {
    v.field("scorer", c.scorer);
    v.field("table", c.table);
    v.field("overrides", c.overrides);
    v.field("remote", c.remote);
    v.field("concurrency", c.scorer_concurrency);
  });
  v.section("seed_data", [&] {
    v.field("count", c.seed_count);
    v.field("max_npcs", c.sampler.max_npcs);
    v.field("max_schedule", c.sampler.max_schedule);
    v.field("max_pedestrians", c.sampler.max_pedestrians);
    v.field("max_speed", c.sampler.max_speed);
    v.field("resolution", c.sampler.resolution);
  });
  v.section("vocab", [&] {
    v.field("speed_bin", c.vocab.speed.width);
    v.field("offset_bin", c.vocab.offset.width);
    v.field("intensity_bin", c.vocab.intensity.width);
    v.field("minute_bin", c.vocab.minute.width);
    v.field("green_bin", c.vocab.green.width);
    v.field("yellow_bin", c.vocab.yellow.width);
    v.field("signal_offset_bin", c.vocab.signal_offset.width);
    v.field("event_time_bin", c.vocab.event_time.width);
    v.field("max_npcs", c.vocab.max_npcs);
  });
  v.section("model", [&] {
    v.field("d_model", c.model.d_model);
    v.field("heads", c.model.heads);
    v.field("layers", c.model.layers);
    v.field("d_ff", c.model.d_ff);
    v.field("context", c.model.context);
  });
  v.section("train", [&] {
    v.field("batch_size", c.train.batch_size);
    v.field("epochs", c.train.epochs);
    v.field("learning_rate", c.train.learning_rate);
    v.field("log_z_learning_rate", c.train.log_z_learning_rate);
    v.field("train_temperature", c.train.train_temperature);
    v.field("gen_temperature", c.train.gen_temperature);
    v.field("reward_epsilon", c.train.reward_epsilon);
    v.field("online_fraction", c.train.online_fraction);
    v.field("init_log_z", c.train.init_log_z);
  });
  v.section("proxy", [&] {
    v.field("embed_dim", c.proxy.embed_dim);
    v.field("hidden", c.proxy.hidden);
    v.field("epochs", c.proxy.epochs);
    v.field("batch_size", c.proxy.batch_size);
    v.field("learning_rate", c.proxy.learning_rate);
    v.field("holdout_fraction", c.proxy.holdout_fraction);
  });
  v.section("generate", [&] {
    v.field("count", c.generate_count);
    v.field("temperature", c.generate_temperature);
    v.field("max_length", c.max_length);
    v.field("rerank_factor", c.rerank_factor);
  });
  v.section("test", [&] {
    v.field("mode", c.mode);
    v.field("tick", c.sim.tick);
    v.field("max_duration", c.sim.max_duration);
    v.field("blockage_timeout", c.sim.blockage_timeout);
  });
  v.section("ego", [&] {
    v.field("cruise_speed", c.ego.cruise_speed);
    v.field("turn_speed", c.ego.turn_speed);
    v.field("accel", c.ego.accel);
    v.field("comfortable_decel", c.ego.comfortable_decel);
    v.field("max_decel", c.ego.max_decel);
    v.field("reaction_gap", c.ego.reaction_gap);
    v.field("gap_acceptance", c.ego.gap_acceptance);
    v.field("stop_on_red", c.ego.stop_on_red);
    v.field("right_on_red", c.ego.right_on_red);
    v.field("yield_to_priority", c.ego.yield_to_priority);
    v.field("yield_to_pedestrians", c.ego.yield_to_pedestrians);
    v.field("check_exit_crosswalk", c.ego.check_exit_crosswalk);
    v.field("lane_keep", c.ego.lane_keep);
    v.field("headlights_in_fog", c.ego.headlights_in_fog);
  });
  v.section("analyze", [&] {
    v.field("stride", c.report.stride);
    v.field("dtw_order", c.report.dtw_order);
    v.field("bleu_max_order", c.report.bleu.max_order);
  });
}

}  // namespace

fs::path default_data_dir() { return LAWFORGE_DEFAULT_DATA_DIR; }

std::string mode_name(sim::TestMode mode) {
  return mode == sim::TestMode::kCoverage ? "coverage" : "counting";
}

sim::TestMode parse_mode(const std::string& name) {
  if (name == "coverage") return sim::TestMode::kCoverage;
  if (name == "counting") return sim::TestMode::kCounting;
  throw ConfigError("unknown test mode '" + name + "'");
}

std::size_t RunConfig::resolved_threads() const {
  if (threads > 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void RunConfig::validate() const {
  if (road.empty()) throw ConfigError("run.road must be set");
  if (scorer != "table" && scorer != "remote") throw ConfigError("weighting.scorer must be \"table\" or \"remote\"");
  if (scorer == "remote" && !remote) throw ConfigError("weighting.remote is required for the remote scorer");
  if (scorer_concurrency == 0) throw ConfigError("weighting.concurrency must be positive");
  if (seed_count == 0) throw ConfigError("seed_data.count must be positive");
  if (generate_count == 0) throw ConfigError("generate.count must be positive");
  if (!(generate_temperature > 0.0)) throw ConfigError("generate.temperature must be positive");
  if (rerank_factor == 0) throw ConfigError("generate.rerank_factor must be positive");
  if (max_length >= model.context) throw ConfigError("generate.max_length must be below model.context");
  for (const auto* b : {&vocab.speed, &vocab.offset, &vocab.intensity, &vocab.minute, &vocab.green, &vocab.yellow,
                        &vocab.signal_offset, &vocab.event_time}) {
    if (!(b->width > 0.0)) throw ConfigError("vocab bin widths must be positive");
  }
  if (sampler.max_npcs > vocab.max_npcs) throw ConfigError("seed_data.max_npcs exceeds vocab.max_npcs");
  if (!(report.stride > 0.0)) throw ConfigError("analyze.stride must be positive");
  if (!(report.dtw_order >= 1.0)) throw ConfigError("analyze.dtw_order must be >= 1");
  if (report.bleu.max_order == 0) throw ConfigError("analyze.bleu_max_order must be positive");
  gen::ModelConfig m = model;
  m.vocab_size = 3;
  m.validate();
  train.validate();
  proxy.validate();
  sim.validate();
  ego.validate();
}

RunConfig parse_config(const nlohmann::json& doc, const fs::path& base) {
  RunConfig cfg;
  const fs::path data = default_data_dir();
  cfg.laws = data / "laws" / "corpus.json";
  cfg.roads = data / "roads";
  cfg.table = data / "weights" / "rules.toml";
  if (auto it = doc.find("schema_version"); it != doc.end() && *it != 1) {
    throw ConfigError("unsupported config schema_version");
  }
  Reader r(doc, base);
  visit(cfg, r);
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::optional<fs::path>& path) {
  if (!path) return parse_config(json::object(), fs::current_path());
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot read config '" + path->string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path->string() + "' is not valid JSON: " + e.what());
  }
  RunConfig cfg = parse_config(doc, fs::absolute(*path).parent_path());
  cfg.source = *path;
  return cfg;
}

nlohmann::json config_snapshot(const RunConfig& cfg) {
  Writer w;
  visit(cfg, w);
  json doc = w.take();
  doc["schema_version"] = 1;
  return doc;
}

}  // namespace lawforge::cli
