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

#include "lawforge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "../common/json_util.hpp"
#include "token.hpp"

namespace lawforge::codec {

namespace {

using lawforge::detail::json;
constexpr int kSchemaVersion = 1;
constexpr double kSpawnGap = 6.0;
constexpr double kScriptMaxSpeed = 20.0;
constexpr double kScriptMaxEventTime = 30.0;

void check_range(double v, double lo, double hi, const std::string& what) {
  if (!std::isfinite(v) || v < lo || v > hi) {
    throw InputError(what + " = " + format_number(v) + " is outside [" + format_number(lo) + ", " +
                     format_number(hi) + "]");
  }
}

void check_lane_name(const std::string& lane, const std::string& what) {
  if (!detail::is_identifier(lane) || detail::is_reserved(lane)) {
    throw InputError(what + " '" + lane + "' is not a valid lane id");
  }
}

double snap(double v, double res) {
  if (res <= 0.0) return v;
  double inv = std::round(1.0 / res);
  if (std::abs(inv * res - 1.0) < 1e-12) return std::round(v * inv) / inv;
  return std::round(v / res) * res;
}

json scenario_to_doc(const NamedScenario& ns) {
  const Scenario& s = ns.scenario;
  json j;
  j["id"] = ns.id;
  j["road"] = s.road;
  j["time"] = {{"hour", s.time.hour}, {"minute", s.time.minute}};
  j["weather"] = json::object();
  for (const auto& [k, v] : s.weather) j["weather"][k] = v;
  j["traffic_lights"] = {{"main_green", s.lights.main_green},
                         {"main_yellow", s.lights.main_yellow},
                         {"cross_green", s.lights.cross_green},
                         {"cross_yellow", s.lights.cross_yellow},
                         {"offset", s.lights.offset}};
  j["ego"] = {{"lane", s.ego.lane},
              {"offset", s.ego.offset},
              {"speed", s.ego.speed},
              {"destination", s.ego.destination}};
  j["npcs"] = json::array();
  for (const auto& n : s.npcs) {
    json jn = {{"id", n.id}, {"lane", n.lane}, {"offset", n.offset}, {"speed", n.speed}};
    if (n.destination) jn["destination"] = *n.destination;
    jn["schedule"] = json::array();
    for (const auto& c : n.schedule) jn["schedule"].push_back({{"t", c.time}, {"speed", c.speed}});
    j["npcs"].push_back(std::move(jn));
  }
  j["pedestrians"] = json::array();
  for (const auto& p : s.pedestrians) {
    j["pedestrians"].push_back({{"crosswalk", p.crosswalk}, {"start", p.start}});
  }
  return j;
}

int require_int(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = lawforge::detail::require(obj, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "/" + key, "expected an integer");
  return v.get<int>();
}

NamedScenario scenario_from_doc(const json& j, const std::string& path) {
  using lawforge::detail::require;
  using lawforge::detail::require_array;
  using lawforge::detail::require_number;
  using lawforge::detail::require_string;
  NamedScenario ns;
  ns.id = require_string(j, "id", path);
  Scenario& s = ns.scenario;
  s.road = require_string(j, "road", path);
  const auto& t = require(j, "time", path);
  s.time.hour = require_int(t, "hour", path + "/time");
  s.time.minute = require_int(t, "minute", path + "/time");
  if (auto it = j.find("weather"); it != j.end()) {
    if (!it->is_object()) throw SchemaError(path + "/weather", "expected an object");
    for (const auto& [k, v] : it->items()) {
      if (!v.is_number()) throw SchemaError(path + "/weather/" + k, "expected a number");
      s.weather[k] = v.get<double>();
    }
  }
  const auto& l = require(j, "traffic_lights", path);
  const std::string lp = path + "/traffic_lights";
  s.lights.main_green = require_number(l, "main_green", lp);
  s.lights.main_yellow = require_number(l, "main_yellow", lp);
  s.lights.cross_green = require_number(l, "cross_green", lp);
  s.lights.cross_yellow = require_number(l, "cross_yellow", lp);
  s.lights.offset = require_number(l, "offset", lp);
  const auto& e = require(j, "ego", path);
  s.ego.lane = require_string(e, "lane", path + "/ego");
  s.ego.offset = require_number(e, "offset", path + "/ego");
  s.ego.speed = require_number(e, "speed", path + "/ego");
  s.ego.destination = require_string(e, "destination", path + "/ego");
  if (j.contains("npcs")) {
    const auto& npcs = require_array(j, "npcs", path);
    for (std::size_t i = 0; i < npcs.size(); ++i) {
      const std::string np = path + "/npcs/" + std::to_string(i);
      NpcState n;
      n.id = require_string(npcs[i], "id", np);
      n.lane = require_string(npcs[i], "lane", np);
      n.offset = require_number(npcs[i], "offset", np);
      n.speed = require_number(npcs[i], "speed", np);
      if (npcs[i].contains("destination")) n.destination = require_string(npcs[i], "destination", np);
      if (npcs[i].contains("schedule")) {
        const auto& sch = require_array(npcs[i], "schedule", np);
        for (std::size_t k = 0; k < sch.size(); ++k) {
          const std::string sp = np + "/schedule/" + std::to_string(k);
          n.schedule.push_back({require_number(sch[k], "t", sp), require_number(sch[k], "speed", sp)});
        }
      }
      s.npcs.push_back(std::move(n));
    }
  }
  if (j.contains("pedestrians")) {
    const auto& peds = require_array(j, "pedestrians", path);
    for (std::size_t i = 0; i < peds.size(); ++i) {
      const std::string pp = path + "/pedestrians/" + std::to_string(i);
      s.pedestrians.push_back({require_string(peds[i], "crosswalk", pp),
                               require_number(peds[i], "start", pp)});
    }
  }
  canonicalize(s);
  try {
    check_invariants(s);
  } catch (const InputError& err) {
    throw SchemaError(path, err.what());
  }
  return ns;
}

}  // namespace

void canonicalize(Scenario& s) {
  std::stable_sort(s.npcs.begin(), s.npcs.end(), [](const NpcState& a, const NpcState& b) {
    bool an = detail::is_npc_id(a.id), bn = detail::is_npc_id(b.id);
    if (an && bn) return detail::npc_number(a.id) < detail::npc_number(b.id);
    if (an != bn) return an;
    return a.id < b.id;
  });
  for (auto& n : s.npcs) {
    std::stable_sort(n.schedule.begin(), n.schedule.end(),
                     [](const SpeedChange& a, const SpeedChange& b) { return a.time < b.time; });
  }
  std::stable_sort(s.pedestrians.begin(), s.pedestrians.end(),
                   [](const PedestrianCrossing& a, const PedestrianCrossing& b) {
                     return std::tie(a.crosswalk, a.start) < std::tie(b.crosswalk, b.start);
                   });
}

void check_invariants(const Scenario& s) {
  if (s.time.hour < 0 || s.time.hour > 23) throw InputError("hour must be in [0, 23]");
  if (s.time.minute < 0 || s.time.minute > 59) throw InputError("minute must be in [0, 59]");
  const auto& types = weather_types();
  for (const auto& [k, v] : s.weather) {
    if (std::find(types.begin(), types.end(), k) == types.end()) {
      throw InputError("unknown weather type '" + k + "'");
    }
    check_range(v, 0.0, 1.0, "weather " + k);
  }
  check_range(s.lights.main_green, Limits::kMinGreen, Limits::kMaxGreen, "main_green");
  check_range(s.lights.cross_green, Limits::kMinGreen, Limits::kMaxGreen, "cross_green");
  check_range(s.lights.main_yellow, 0.0, Limits::kMaxYellow, "main_yellow");
  check_range(s.lights.cross_yellow, 0.0, Limits::kMaxYellow, "cross_yellow");
  check_range(s.lights.offset, 0.0, Limits::kMaxSignalOffset, "signal offset");

  check_lane_name(s.ego.lane, "ego lane");
  check_lane_name(s.ego.destination, "ego destination");
  check_range(s.ego.offset, 0.0, Limits::kMaxOffset, "ego offset");
  check_range(s.ego.speed, 0.0, Limits::kMaxSpeed, "ego speed");

  std::set<std::string> ids;
  for (const auto& n : s.npcs) {
    if (!detail::is_npc_id(n.id)) throw InputError("NPC id '" + n.id + "' must look like npc<k>");
    if (!ids.insert(n.id).second) throw InputError("duplicate NPC id '" + n.id + "'");
    check_lane_name(n.lane, n.id + " lane");
    if (n.destination) check_lane_name(*n.destination, n.id + " destination");
    check_range(n.offset, 0.0, Limits::kMaxOffset, n.id + " offset");
    check_range(n.speed, 0.0, Limits::kMaxSpeed, n.id + " speed");
    for (std::size_t i = 0; i < n.schedule.size(); ++i) {
      check_range(n.schedule[i].time, 0.0, Limits::kMaxEventTime, n.id + " schedule time");
      check_range(n.schedule[i].speed, 0.0, Limits::kMaxSpeed, n.id + " schedule speed");
      if (i > 0 && !(n.schedule[i].time > n.schedule[i - 1].time)) {
        throw InputError(n.id + " schedule times must be strictly increasing");
      }
    }
  }
  for (const auto& p : s.pedestrians) {
    if (!detail::is_identifier(p.crosswalk)) throw InputError("bad crosswalk id '" + p.crosswalk + "'");
    check_range(p.start, 0.0, Limits::kMaxEventTime, "pedestrian start");
  }
}

void check_invariants(const Scenario& s, const sim::RoadStructure& road) {
  check_invariants(s);
  if (s.road != road.tag()) {
    throw InputError("scenario is for road '" + s.road + "', not '" + road.tag() + "'");
  }
  auto lane = [&](const std::string& id, const std::string& who) {
    if (!road.find_lane(id)) {
      throw InputError(who + " references lane '" + id + "' absent from road " + road.tag());
    }
  };
  lane(s.ego.lane, "ego");
  lane(s.ego.destination, "ego destination");
  for (const auto& n : s.npcs) {
    lane(n.lane, n.id);
    if (n.destination) lane(*n.destination, n.id + " destination");
  }
  for (const auto& p : s.pedestrians) {
    if (!road.find_crosswalk(p.crosswalk)) {
      throw InputError("crosswalk '" + p.crosswalk + "' absent from road " + road.tag());
    }
  }
}

std::vector<std::string> constraint_violations(const Scenario& s, const sim::RoadStructure& road) {
  std::vector<std::string> out;
  try {
    check_invariants(s, road);
  } catch (const InputError& e) {
    out.emplace_back(e.what());
    return out;
  }
  const auto* ego_lane = road.find_lane(s.ego.lane);
  if (ego_lane->role != sim::LaneRole::kIncoming) out.push_back("ego must start on an approach lane");
  const auto* ego_route = road.route(s.ego.lane, s.ego.destination);
  if (!ego_route) {
    out.push_back("no movement from " + s.ego.lane + " to " + s.ego.destination);
  } else if (ego_route->crosses_junction && s.ego.offset >= ego_route->stop_line_s) {
    out.push_back("ego starts past the stop line");
  }
  if (s.ego.speed > kScriptMaxSpeed) out.push_back("ego speed above the scripted maximum");

  struct Spawn {
    std::string lane;
    double offset;
    std::string who;
  };
  std::vector<Spawn> spawns{{s.ego.lane, s.ego.offset, "ego"}};
  for (const auto& n : s.npcs) {
    const auto* lane = road.find_lane(n.lane);
    std::string dest = n.destination.value_or(n.lane);
    if (n.destination && !road.route(n.lane, *n.destination)) {
      out.push_back("no movement from " + n.lane + " to " + dest + " for " + n.id);
    }
    if (n.offset > lane->centerline.length()) out.push_back(n.id + " starts beyond its lane end");
    if (n.speed > kScriptMaxSpeed) out.push_back(n.id + " speed above the scripted maximum");
    for (const auto& c : n.schedule) {
      if (c.time > kScriptMaxEventTime) out.push_back(n.id + " schedule runs past the horizon");
      if (c.speed > kScriptMaxSpeed) out.push_back(n.id + " scheduled speed above the maximum");
    }
    spawns.push_back({n.lane, n.offset, n.id});
  }
  for (std::size_t i = 0; i < spawns.size(); ++i) {
    for (std::size_t k = i + 1; k < spawns.size(); ++k) {
      if (spawns[i].lane == spawns[k].lane &&
          std::abs(spawns[i].offset - spawns[k].offset) < kSpawnGap) {
        out.push_back(spawns[i].who + " and " + spawns[k].who + " spawn too close");
      }
    }
  }
  for (const auto& p : s.pedestrians) {
    if (p.start > kScriptMaxEventTime) out.push_back("pedestrian crossing starts past the horizon");
  }
  return out;
}

Scenario sample_scenario(std::mt19937_64& rng, const sim::RoadStructure& road,
                         const SamplerOptions& opts) {
  auto uni = [&](double lo, double hi) {
    return snap(std::uniform_real_distribution<double>(lo, hi)(rng), opts.resolution);
  };
  auto pick = [&](const std::vector<std::string>& v) -> const std::string& {
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
  };
  auto count = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(0, hi)(rng); };
  const double top_speed = std::min(opts.max_speed, kScriptMaxSpeed);

  Scenario s;
  s.road = road.tag();
  s.time.hour = std::uniform_int_distribution<int>(0, 23)(rng);
  s.time.minute = std::uniform_int_distribution<int>(0, 59)(rng);
  for (const auto& type : weather_types()) {
    if (std::bernoulli_distribution(0.5)(rng)) s.weather[type] = uni(0.0, 1.0);
  }
  s.lights.main_green = uni(5.0, 40.0);
  s.lights.main_yellow = uni(2.0, 5.0);
  s.lights.cross_green = uni(5.0, 40.0);
  s.lights.cross_yellow = uni(2.0, 5.0);
  s.lights.offset = uni(0.0, std::min(s.lights.cycle(), Limits::kMaxSignalOffset) - 0.5);

  const auto incoming = road.incoming_lanes();
  const auto lanes = road.lane_ids();
  s.ego.lane = pick(incoming);
  s.ego.destination = pick(road.destinations(s.ego.lane));
  const auto* ego_route = road.route(s.ego.lane, s.ego.destination);
  s.ego.offset = uni(0.0, std::min(45.0, ego_route->stop_line_s - 1.0));
  s.ego.speed = uni(0.0, top_speed);

  std::vector<std::pair<std::string, double>> taken{{s.ego.lane, s.ego.offset}};
  const std::size_t n_npcs = count(opts.max_npcs);
  for (std::size_t i = 0; i < n_npcs; ++i) {
    NpcState n;
    n.id = "npc" + std::to_string(i + 1);
    bool placed = false;
    for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
      n.lane = pick(lanes);
      n.offset = uni(0.0, 50.0);
      placed = std::none_of(taken.begin(), taken.end(), [&](const auto& t) {
        return t.first == n.lane && std::abs(t.second - n.offset) < kSpawnGap;
      });
    }
    if (!placed) continue;
    n.speed = uni(0.0, top_speed);
    n.destination = pick(road.destinations(n.lane));
    double t = 0.0;
    const std::size_t n_sched = count(opts.max_schedule);
    for (std::size_t k = 0; k < n_sched; ++k) {
      double next = uni(t + 0.5, t + 10.0);
      if (next <= t || next > kScriptMaxEventTime) break;
      t = next;
      n.schedule.push_back({t, uni(0.0, top_speed)});
    }
    taken.emplace_back(n.lane, n.offset);
    s.npcs.push_back(std::move(n));
  }
  // Keep ids dense after dropped placements.
  for (std::size_t i = 0; i < s.npcs.size(); ++i) s.npcs[i].id = "npc" + std::to_string(i + 1);

  const auto crosswalks = road.crosswalk_ids();
  if (!crosswalks.empty()) {
    const std::size_t n_peds = count(opts.max_pedestrians);
    for (std::size_t i = 0; i < n_peds; ++i) {
      s.pedestrians.push_back({pick(crosswalks), uni(0.0, 20.0)});
    }
  }
  canonicalize(s);
  return s;
}

std::string scenario_to_json(const NamedScenario& s) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scenario"] = scenario_to_doc(s);
  return doc.dump(2);
}

NamedScenario scenario_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("scenario is not valid JSON: ") + e.what());
  }
  lawforge::detail::check_schema_version(doc, kSchemaVersion);
  return scenario_from_doc(lawforge::detail::require(doc, "scenario", ""), "/scenario");
}

std::vector<NamedScenario> load_scenarios(const std::filesystem::path& path) {
  const json doc = lawforge::detail::read_json_file(path);
  lawforge::detail::check_schema_version(doc, kSchemaVersion);
  std::vector<NamedScenario> out;
  if (doc.contains("scenario")) {
    out.push_back(scenario_from_doc(doc["scenario"], "/scenario"));
    return out;
  }
  const auto& arr = lawforge::detail::require_array(doc, "scenarios", "");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = "/scenarios/" + std::to_string(i);
    out.push_back(scenario_from_doc(arr[i], p));
    if (!ids.insert(out.back().id).second) throw SchemaError(p + "/id", "duplicate scenario id");
  }
  return out;
}

void store_scenarios(const std::vector<NamedScenario>& batch, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scenarios"] = json::array();
  for (const auto& s : batch) doc["scenarios"].push_back(scenario_to_doc(s));
  lawforge::detail::write_json_file(path, doc);
}

}  // namespace lawforge::codec
