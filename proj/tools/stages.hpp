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

#include <filesystem>
#include <optional>

#include "config.hpp"

namespace lawforge::cli {

// Each stage reads prior artifacts, writes its outputs and a manifest.json
// into `out`, and throws ConfigError, InputError or StageError on failure.

void run_weigh(const RunConfig& cfg, const fs::path& out, const std::optional<fs::path>& compare);

void run_encode(const RunConfig& cfg, const fs::path& scenarios, const fs::path& out, bool quantize);

void run_seed_data(const RunConfig& cfg, const fs::path& weights, const fs::path& out);

void run_train(const RunConfig& cfg, const fs::path& data, const fs::path& vocab, const fs::path& out);

void run_generate(const RunConfig& cfg, const fs::path& model, const fs::path& vocab,
                  const std::optional<fs::path>& proxy, const fs::path& out);

void run_test(const RunConfig& cfg, const fs::path& scenarios, const fs::path& weights, const fs::path& out);

void run_analyze(const RunConfig& cfg, const fs::path& sequences, const fs::path& vocab,
                 const std::optional<fs::path>& trajectories, const std::optional<fs::path>& violations,
                 const fs::path& out);

// All stages in order under cfg.output_dir.
void run_pipeline(const RunConfig& cfg);

}  // namespace lawforge::cli
