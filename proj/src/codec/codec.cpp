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
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <utility>

#include "../common/json_util.hpp"
#include "lawforge/codec.hpp"
#include "token.hpp"

namespace lawforge::codec {

namespace {

using lawforge::detail::json;
using detail::ParsedToken;
using detail::TokenKind;
constexpr int kSchemaVersion = 1;

std::string join(std::string_view a, std::string_view b, std::string_view c) {
  std::string out;
  out.reserve(a.size() + b.size() + c.size() + 2);
  out.append(a).append("+").append(b).append("+").append(c);
  return out;
}

double light_field(const SignalProgram& p, std::string_view f) {
  if (f == "main_green") return p.main_green;
  if (f == "main_yellow") return p.main_yellow;
  if (f == "cross_green") return p.cross_green;
  if (f == "cross_yellow") return p.cross_yellow;
  return p.offset;
}

double& light_field(SignalProgram& p, std::string_view f) {
  if (f == "main_green") return p.main_green;
  if (f == "main_yellow") return p.main_yellow;
  if (f == "cross_green") return p.cross_green;
  if (f == "cross_yellow") return p.cross_yellow;
  return p.offset;
}

std::pair<double, double> light_range(std::string_view f) {
  if (f == "main_green" || f == "cross_green") return {Limits::kMinGreen, Limits::kMaxGreen};
  if (f == "offset") return {0.0, Limits::kMaxSignalOffset};
  return {0.0, Limits::kMaxYellow};
}

// Per-vehicle state accumulated while decoding.
struct VehicleDraft {
  std::optional<std::pair<std::string, double>> place;
  std::optional<double> speed;
  std::optional<std::string> destination;
  std::vector<SpeedChange> schedule;
};

class Decoder {
 public:
  Decoder(const ActionSequence& seq, const sim::RoadStructure& road) : seq_(seq), road_(road) {}

  DecodeResult run() {
    const auto& tokens = seq_.tokens;
    if (tokens.empty()) missing("time");
    bool have_time = false;
    std::map<std::string, double> lights;

    for (index_ = 0; index_ < tokens.size(); ++index_) {
      const ParsedToken tok = detail::parse_token(tokens[index_]);
      if (index_ == 0 && tok.kind != TokenKind::kTime) {
        throw DecodeError(DecodeError::Kind::kOrder, "sequence must begin with a time token");
      }
      switch (tok.kind) {
        case TokenKind::kTime: {
          if (have_time) duplicate("time token");
          have_time = true;
          out_.scenario.time.hour = static_cast<int>(clamp("hour", tok.hour, 0, 23));
          out_.scenario.time.minute = static_cast<int>(clamp("minute", tok.value, 0, 59));
          break;
        }
        case TokenKind::kWeather: {
          const auto& types = weather_types();
          if (std::find(types.begin(), types.end(), tok.key) == types.end()) {
            throw DecodeError(DecodeError::Kind::kUnknownReference,
                              "unknown weather type '" + tok.key + "'");
          }
          if (out_.scenario.weather.count(tok.key)) duplicate("weather " + tok.key);
          out_.scenario.weather[tok.key] = clamp("weather " + tok.key, tok.value, 0.0, 1.0);
          break;
        }
        case TokenKind::kLight: {
          if (lights.count(tok.key)) duplicate("light " + tok.key);
          auto [lo, hi] = light_range(tok.key);
          lights[tok.key] = clamp("light " + tok.key, tok.value, lo, hi);
          break;
        }
        case TokenKind::kPed: {
          if (!road_.find_crosswalk(tok.key)) {
            throw DecodeError(DecodeError::Kind::kUnknownReference,
                              "crosswalk '" + tok.key + "' absent from road " + road_.tag());
          }
          out_.scenario.pedestrians.push_back(
              {tok.key, clamp("ped start", tok.value, 0.0, Limits::kMaxEventTime)});
          break;
        }
        case TokenKind::kPlace: {
          auto& v = vehicle(tok.entity);
          lane(tok.key);
          if (v.place) duplicate(tok.entity + " initial lane");
          v.place = {tok.key, clamp(tok.entity + " offset", tok.value, 0.0, Limits::kMaxOffset)};
          break;
        }
        case TokenKind::kSpeed: {
          auto& v = vehicle(tok.entity);
          if (v.speed) duplicate(tok.entity + " initial speed");
          v.speed = clamp(tok.entity + " speed", tok.value, 0.0, Limits::kMaxSpeed);
          break;
        }
        case TokenKind::kDest: {
          auto& v = vehicle(tok.entity);
          lane(tok.key);
          if (v.destination) duplicate(tok.entity + " destination");
          v.destination = tok.key;
          break;
        }
        case TokenKind::kAt: {
          auto& v = vehicle(tok.entity);
          double t = clamp(tok.entity + " schedule time", tok.value, 0.0, Limits::kMaxEventTime);
          if (index_ + 1 >= tokens.size()) {
            throw DecodeError(DecodeError::Kind::kOrder,
                              "schedule point for " + tok.entity + " has no speed");
          }
          ++index_;
          const ParsedToken next = detail::parse_token(tokens[index_]);
          if (next.kind != TokenKind::kSpeed || next.entity != tok.entity) {
            throw DecodeError(DecodeError::Kind::kOrder,
                              "schedule point for " + tok.entity + " must be followed by its speed");
          }
          for (const auto& c : v.schedule) {
            if (c.time == t) duplicate(tok.entity + " schedule point");
          }
          v.schedule.push_back(
              {t, clamp(tok.entity + " schedule speed", next.value, 0.0, Limits::kMaxSpeed)});
          break;
        }
      }
    }

    Scenario& s = out_.scenario;
    s.road = road_.tag();
    for (auto f : detail::kLightFields) {
      auto it = lights.find(std::string(f));
      if (it == lights.end()) missing("light " + std::string(f));
      light_field(s.lights, f) = it->second;
    }
    auto ego_it = vehicles_.find("ego");
    if (ego_it == vehicles_.end() || !ego_it->second.place) missing("ego lane");
    const auto& ego = ego_it->second;
    if (!ego.speed) missing("ego speed");
    if (!ego.destination) missing("ego destination");
    s.ego = {ego.place->first, ego.place->second, *ego.speed, *ego.destination};
    for (auto& [id, v] : vehicles_) {
      if (id == "ego") continue;
      if (!v.place) missing(id + " lane");
      if (!v.speed) missing(id + " speed");
      s.npcs.push_back({id, v.place->first, v.place->second, *v.speed, v.destination, v.schedule});
    }
    canonicalize(s);
    return std::move(out_);
  }

 private:
  VehicleDraft& vehicle(const std::string& id) { return vehicles_[id]; }

  void lane(const std::string& id) {
    if (!road_.find_lane(id)) {
      throw DecodeError(DecodeError::Kind::kUnknownReference,
                        "lane '" + id + "' absent from road " + road_.tag());
    }
  }

  double clamp(const std::string& field, double v, double lo, double hi) {
    double c = std::clamp(v, lo, hi);
    if (c != v) out_.clamped.push_back({index_, field, v, c});
    return c;
  }

  [[noreturn]] void duplicate(const std::string& what) {
    throw DecodeError(DecodeError::Kind::kDuplicate,
                      "duplicate " + what + " at token " + std::to_string(index_));
  }

  [[noreturn]] void missing(const std::string& what) {
    throw DecodeError(DecodeError::Kind::kMissingField, "missing required field: " + what);
  }

  const ActionSequence& seq_;
  const sim::RoadStructure& road_;
  std::size_t index_ = 0;
  std::map<std::string, VehicleDraft> vehicles_;
  DecodeResult out_;
};

}  // namespace

ActionSequence encode(const Scenario& scenario) {
  Scenario s = scenario;
  canonicalize(s);
  check_invariants(s);
  ActionSequence seq;
  auto& t = seq.tokens;
  t.push_back(join("time", std::to_string(s.time.hour), std::to_string(s.time.minute)));
  for (const auto& [type, v] : s.weather) t.push_back(join("weather", type, format_number(v)));
  for (auto f : detail::kLightFields) t.push_back(join("light", f, format_number(light_field(std::as_const(s.lights), f))));
  t.push_back(join("ego", s.ego.lane, format_number(s.ego.offset)));
  t.push_back(join("ego", "speed", format_number(s.ego.speed)));
  t.push_back(join("ego", "dest", s.ego.destination));
  for (const auto& n : s.npcs) {
    t.push_back(join(n.id, n.lane, format_number(n.offset)));
    t.push_back(join(n.id, "speed", format_number(n.speed)));
    if (n.destination) t.push_back(join(n.id, "dest", *n.destination));
    for (const auto& c : n.schedule) {
      t.push_back(join(n.id, "at", format_number(c.time)));
      t.push_back(join(n.id, "speed", format_number(c.speed)));
    }
  }
  for (const auto& p : s.pedestrians) t.push_back(join("ped", p.crosswalk, format_number(p.start)));
  return seq;
}

ActionSequence encode(const Scenario& s, const sim::RoadStructure& road) {
  Scenario c = s;
  canonicalize(c);
  check_invariants(c, road);
  return encode(c);
}

DecodeResult decode(const ActionSequence& seq, const sim::RoadStructure& road) {
  return Decoder(seq, road).run();
}

std::vector<SequenceRecord> load_sequences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<SequenceRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string p = "/" + std::to_string(lineno - 1);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(p, std::string("not valid JSON: ") + e.what());
    }
    lawforge::detail::check_schema_version(j, kSchemaVersion, p);
    SequenceRecord r;
    r.id = lawforge::detail::require_string(j, "id", p);
    r.road = lawforge::detail::require_string(j, "road", p);
    const auto& toks = lawforge::detail::require_array(j, "tokens", p);
    for (const auto& t : toks) {
      if (!t.is_string()) throw SchemaError(p + "/tokens", "expected strings");
      r.sequence.tokens.push_back(t.get<std::string>());
    }
    if (auto it = j.find("reward"); it != j.end() && !it->is_null()) {
      if (!it->is_number()) throw SchemaError(p + "/reward", "expected a number");
      r.sequence.reward = it->get<double>();
    }
    out.push_back(std::move(r));
  }
  return out;
}

void store_sequences(const std::vector<SequenceRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (const auto& r : records) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["id"] = r.id;
    j["road"] = r.road;
    j["tokens"] = r.sequence.tokens;
    if (r.sequence.reward) j["reward"] = *r.sequence.reward;
    out << j.dump() << '\n';
  }
}

}  // namespace lawforge::codec
