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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "lawforge/analytics.hpp"
#include "lawforge/codec.hpp"
#include "lawforge/generator.hpp"
#include "lawforge/scenario.hpp"
#include "lawforge/sim.hpp"

namespace lawforge::cli {

namespace fs = std::filesystem;

// Everything a run needs. Loaded from one JSON document; every field has a
// default so an empty document is a valid configuration.
struct RunConfig {
  std::optional<fs::path> source;
  std::uint64_t seed = 1;
  std::string road = "S3";
  std::size_t threads = 0;  // 0: available cores
  fs::path output_dir = "lawforge-run";

  fs::path laws;
  fs::path roads;

  std::string scorer = "table";
  fs::path table;
  std::optional<fs::path> overrides;
  std::optional<fs::path> remote;
  std::size_t scorer_concurrency = 1;

  std::size_t seed_count = 2048;
  codec::SamplerOptions sampler;

  codec::VocabSpec vocab;

  gen::ModelConfig model;
  gen::TrainConfig train;
  gen::ProxyConfig proxy;

  std::size_t generate_count = 256;
  double generate_temperature = 1.0;
  std::size_t max_length = 0;  // 0: model context - 1
  std::size_t rerank_factor = 1;

  sim::TestMode mode = sim::TestMode::kCounting;
  sim::SimConfig sim;
  sim::EgoPolicy ego;

  analytics::ReportOptions report;

  std::size_t resolved_threads() const;
  void validate() const;
};

// Default data directory compiled into the tool.
fs::path default_data_dir();

// Throws ConfigError on unreadable files, unknown keys or bad values.
RunConfig load_config(const std::optional<fs::path>& path);
RunConfig parse_config(const nlohmann::json& doc, const fs::path& base);

// Fully resolved configuration, as recorded in manifests.
nlohmann::json config_snapshot(const RunConfig& cfg);

std::string mode_name(sim::TestMode mode);
sim::TestMode parse_mode(const std::string& name);

}  // namespace lawforge::cli
