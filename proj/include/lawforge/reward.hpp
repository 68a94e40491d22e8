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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lawforge/law.hpp"
#include "lawforge/stl.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::reward {

// A law corpus with one risk weight per law.
class WeightedCorpus {
 public:
  WeightedCorpus() = default;
  // Throws InputError when a law has no weight or a weight is negative.
  WeightedCorpus(stl::LawCorpus corpus, std::map<std::string, double> weights);

  const stl::LawCorpus& corpus() const noexcept { return corpus_; }
  double weight(std::string_view law_id) const;
  WeightedCorpus with_weight(std::string_view law_id, double w) const;

  // Ids of laws applicable to a road structure, in corpus order.
  std::vector<std::string> applicable(std::string_view road) const;
  std::vector<std::string> ids() const;

 private:
  stl::LawCorpus corpus_;
  std::map<std::string, double, std::less<>> weights_;
};

struct LawScore {
  std::string law_id;
  double robustness_at_start = 0.0;  // whole-trace value at t = 0
  double min_robustness = 0.0;       // most violating defined instant
  double attaining_time = 0.0;
  double weight = 0.0;
  double weighted = 0.0;             // weight * max(0, -min_robustness)
  bool violated() const { return min_robustness < 0.0; }
};

struct RewardRecord {
  std::string scenario_id;
  std::vector<LawScore> entries;
  double overall = 0.0;
  std::optional<std::string> attributed_law;
};

// Scores `trace` against the laws named by `subset` (corpus order is not
// required; entries follow `subset`). Throws InputError on an empty subset,
// unknown ids, or missing signals.
RewardRecord score_scenario(const trace::Trace& trace, const WeightedCorpus& laws,
                            const std::vector<std::string>& subset,
                            const stl::MonitorOptions& opts = {});

// Reward report: JSON lines, one RewardRecord per scenario.
void store_rewards(const std::vector<RewardRecord>& records, const std::filesystem::path& path);
std::vector<RewardRecord> load_rewards(const std::filesystem::path& path);

}  // namespace lawforge::reward
