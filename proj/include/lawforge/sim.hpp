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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lawforge/reward.hpp"
#include "lawforge/road.hpp"
#include "lawforge/scenario.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::sim {

// Rule-based stand-in for the system under test. The defaults leave a few
// deliberate gaps (see docs/simulator.md) so that violations are reachable.
struct EgoPolicy {
  double cruise_speed = 8.0;
  double turn_speed = 5.0;
  double accel = 2.0;
  double comfortable_decel = 3.0;
  double max_decel = 6.0;
  // Desired time gap to a leader (s) on top of a 2 m standstill gap.
  double reaction_gap = 1.5;
  // Minimum time-to-conflict of a priority vehicle the ego accepts.
  double gap_acceptance = 3.0;
  bool stop_on_red = true;
  bool right_on_red = false;
  bool yield_to_priority = true;
  bool yield_to_pedestrians = true;
  bool check_exit_crosswalk = false;
  bool lane_keep = true;
  bool headlights_in_fog = false;

  void validate() const;
};

struct SimConfig {
  double tick = 0.1;
  double max_duration = 60.0;
  double blockage_timeout = 15.0;
  // Reserved; the simulation core draws no random numbers.
  std::uint64_t seed = 0;

  void validate() const;
};

// Fixed per-class quantities shared by the simulator and its tests.
struct Constants {
  static constexpr double kVehicleLength = 4.5;
  static constexpr double kVehicleWidth = 1.8;
  static constexpr double kNpcAccel = 3.0;
  static constexpr double kNpcDecel = 6.0;
  static constexpr double kPedestrianSpeed = 1.4;
  static constexpr double kStandstillGap = 2.0;
  static constexpr double kStopMargin = 0.5;
  static constexpr double kMovingSpeed = 0.5;     // "speed" signal
  static constexpr double kDistanceBudget = 10.0; // "length" signal
  static constexpr double kNoTarget = 1000.0;     // distance signals with nothing ahead
  static constexpr double kMaxHeadway = 10.0;
  static constexpr double kPriorityHorizon = 4.0;
  static constexpr double kAttentionRange = 30.0;
  static constexpr double kFogVisibility = 0.3;
};

// Names of every signal run_scenario writes (NPC signals for npc1..npc<n>).
std::set<std::string> trace_signals(std::size_t npc_count = 0);

// Simulates one scenario. Throws InputError if the scenario does not fit the
// road (unknown lanes, unreachable destinations, overlapping spawns).
trace::Trace run_scenario(const codec::Scenario& scenario, const RoadStructure& road,
                          const EgoPolicy& ego, const SimConfig& cfg,
                          const std::string& scenario_id = "");

enum class TestMode { kCoverage, kCounting };

struct Violation {
  std::string law_id;
  std::string scenario_id;
  double min_robustness = 0.0;
  double attaining_time = 0.0;
};

struct ScenarioFailure {
  std::string scenario_id;
  std::string error;
};

struct BatchOptions {
  TestMode mode = TestMode::kCoverage;
  std::size_t threads = 1;
  // Law ids to monitor; empty means every law applicable to the road.
  std::vector<std::string> laws;
  bool keep_traces = false;
};

struct BatchResult {
  std::vector<Violation> violations;
  std::map<std::string, int> counts;          // per law, zero entries included
  std::vector<std::string> remaining_laws;    // working set after the batch
  std::vector<ScenarioFailure> failures;
  std::vector<reward::RewardRecord> rewards;  // one per simulated scenario
  std::vector<trace::Trace> traces;           // when keep_traces
};

// Runs every scenario and monitors the laws. Coverage mode drops a law from
// the working set after its first violation; counting mode keeps all laws.
BatchResult test_batch(const std::vector<codec::NamedScenario>& batch, const RoadStructure& road,
                       const reward::WeightedCorpus& laws, const EgoPolicy& ego,
                       const SimConfig& cfg, const BatchOptions& opts = {});

void store_violation_report(const BatchResult& result, TestMode mode, const std::string& road,
                            const std::filesystem::path& path);

}  // namespace lawforge::sim
