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

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "../common/json_util.hpp"
#include "lawforge/sim.hpp"

namespace lawforge::sim {

namespace {

constexpr int kSchemaVersion = 1;

struct Slot {
  std::optional<trace::Trace> trace;
  reward::RewardRecord record;
  std::string error;
};

std::vector<std::string> monitored_laws(const reward::WeightedCorpus& laws, const std::string& road,
                                        const std::vector<std::string>& requested) {
  if (requested.empty()) return laws.applicable(road);
  for (const auto& id : requested) {
    if (!laws.corpus().contains(id)) throw ConfigError("unknown law id '" + id + "'");
  }
  return requested;
}

void check_signal_completeness(const reward::WeightedCorpus& laws,
                               const std::vector<std::string>& ids) {
  const auto available = trace_signals(codec::SamplerOptions{}.max_npcs);
  for (const auto& id : ids) {
    for (const auto& sig : stl::required_signals(laws.corpus().at(id).formula)) {
      if (available.count(sig) == 0) {
        throw StageError("law " + id + " needs signal '" + sig + "' that the simulator lacks");
      }
    }
  }
}

}  // namespace

BatchResult test_batch(const std::vector<codec::NamedScenario>& batch, const RoadStructure& road,
                       const reward::WeightedCorpus& laws, const EgoPolicy& ego,
                       const SimConfig& cfg, const BatchOptions& opts) {
  ego.validate();
  cfg.validate();
  const auto ids = monitored_laws(laws, road.tag(), opts.laws);
  if (ids.empty()) throw ConfigError("no law applies to road " + road.tag());
  check_signal_completeness(laws, ids);

  std::vector<Slot> slots(batch.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < batch.size(); i = next++) {
      Slot& slot = slots[i];
      try {
        slot.trace = run_scenario(batch[i].scenario, road, ego, cfg, batch[i].id);
        slot.record = reward::score_scenario(*slot.trace, laws, ids);
        slot.record.scenario_id = batch[i].id;
      } catch (const std::exception& e) {
        slot.trace.reset();
        slot.error = e.what();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(opts.threads, 1, std::max<std::size_t>(batch.size(), 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < threads; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BatchResult out;
  for (const auto& id : ids) out.counts[id] = 0;
  std::vector<std::string> working = ids;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Slot& slot = slots[i];
    if (!slot.trace) {
      out.failures.push_back({batch[i].id, slot.error});
      continue;
    }
    for (const auto& e : slot.record.entries) {
      if (!e.violated()) continue;
      auto it = std::find(working.begin(), working.end(), e.law_id);
      if (opts.mode == TestMode::kCoverage) {
        if (it == working.end()) continue;
        working.erase(it);
      }
      out.violations.push_back({e.law_id, batch[i].id, e.min_robustness, e.attaining_time});
      ++out.counts[e.law_id];
    }
    out.rewards.push_back(std::move(slot.record));
    if (opts.keep_traces) out.traces.push_back(std::move(*slot.trace));
  }
  out.remaining_laws = working;
  return out;
}

void store_violation_report(const BatchResult& result, TestMode mode, const std::string& road,
                            const std::filesystem::path& path) {
  using detail::json;
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["mode"] = mode == TestMode::kCoverage ? "coverage" : "counting";
  doc["road"] = road;
  doc["violations"] = json::array();
  for (const auto& v : result.violations) {
    doc["violations"].push_back({{"law_id", v.law_id},
                                 {"scenario_id", v.scenario_id},
                                 {"min_robustness", v.min_robustness},
                                 {"attaining_time", v.attaining_time}});
  }
  doc["counts"] = result.counts;
  doc["remaining_laws"] = result.remaining_laws;
  doc["failures"] = json::array();
  for (const auto& f : result.failures) {
    doc["failures"].push_back({{"scenario_id", f.scenario_id}, {"error", f.error}});
  }
  detail::write_json_file(path, doc);
}

}  // namespace lawforge::sim
