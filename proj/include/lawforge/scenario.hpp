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
#include <random>
#include <string>
#include <vector>

#include "lawforge/road.hpp"

namespace lawforge::codec {

struct TimeOfDay {
  int hour = 12;
  int minute = 0;
  friend bool operator==(const TimeOfDay&, const TimeOfDay&) = default;
};

// Two-phase program: the "main" group runs green then yellow, then the
// "cross" group. `offset` shifts the cycle start (seconds).
struct SignalProgram {
  double main_green = 20.0;
  double main_yellow = 3.0;
  double cross_green = 20.0;
  double cross_yellow = 3.0;
  double offset = 0.0;
  double cycle() const { return main_green + main_yellow + cross_green + cross_yellow; }
  friend bool operator==(const SignalProgram&, const SignalProgram&) = default;
};

struct EgoState {
  std::string lane;
  double offset = 0.0;
  double speed = 0.0;
  std::string destination;
  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct SpeedChange {
  double time = 0.0;
  double speed = 0.0;
  friend bool operator==(const SpeedChange&, const SpeedChange&) = default;
};

struct NpcState {
  std::string id;
  std::string lane;
  double offset = 0.0;
  double speed = 0.0;
  std::optional<std::string> destination;
  std::vector<SpeedChange> schedule;
  friend bool operator==(const NpcState&, const NpcState&) = default;
};

struct PedestrianCrossing {
  std::string crosswalk;
  double start = 0.0;
  friend bool operator==(const PedestrianCrossing&, const PedestrianCrossing&) = default;
};

struct Scenario {
  std::string road;
  TimeOfDay time;
  std::map<std::string, double> weather;
  SignalProgram lights;
  EgoState ego;
  std::vector<NpcState> npcs;
  std::vector<PedestrianCrossing> pedestrians;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct NamedScenario {
  std::string id;
  Scenario scenario;
};

// Legal value ranges. Decoding clamps into these and reports the change.
struct Limits {
  static constexpr double kMaxSpeed = 40.0;
  static constexpr double kMaxOffset = 60.0;
  static constexpr double kMinGreen = 1.0;
  static constexpr double kMaxGreen = 90.0;
  static constexpr double kMaxYellow = 10.0;
  static constexpr double kMaxSignalOffset = 90.0;
  static constexpr double kMaxEventTime = 60.0;
};

inline const std::vector<std::string>& weather_types() {
  static const std::vector<std::string> kTypes = {"cloudiness", "fog", "rain", "wetness"};
  return kTypes;
}

// Orders NPCs by numeric id suffix, schedules by time and crossings by
// (crosswalk, start). Encoding and decoding both produce this form.
void canonicalize(Scenario& s);

// Throws InputError when a type invariant is broken (ranges, identifiers,
// unique NPC ids, increasing schedules).
void check_invariants(const Scenario& s);
// As above, and every lane and crosswalk must exist in `road`.
void check_invariants(const Scenario& s, const sim::RoadStructure& road);

// Logical constraints a runnable scenario must also meet (reachable
// destinations, spawn spacing, offsets on the lane). Empty when satisfied.
std::vector<std::string> constraint_violations(const Scenario& s, const sim::RoadStructure& road);

struct SamplerOptions {
  std::size_t max_npcs = 4;
  std::size_t max_schedule = 2;
  std::size_t max_pedestrians = 2;
  double max_speed = 16.0;
  // Values are rounded to this grid; 0 keeps raw doubles.
  double resolution = 0.1;
};

// Draws a scenario that satisfies both invariants and constraints on `road`.
Scenario sample_scenario(std::mt19937_64& rng, const sim::RoadStructure& road,
                         const SamplerOptions& opts = {});

// Scenario script files. A single-scenario document carries one "scenario";
// a batch document carries "scenarios". Both accept either on load.
std::vector<NamedScenario> load_scenarios(const std::filesystem::path& path);
void store_scenarios(const std::vector<NamedScenario>& batch, const std::filesystem::path& path);
std::string scenario_to_json(const NamedScenario& s);
NamedScenario scenario_from_json(std::string_view text);

}  // namespace lawforge::codec
