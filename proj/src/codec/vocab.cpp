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

#include <cmath>

#include "../common/json_util.hpp"
#include "lawforge/codec.hpp"
#include "token.hpp"

namespace lawforge::codec {

namespace {

using lawforge::detail::json;
using detail::TokenKind;
constexpr int kSchemaVersion = 1;
constexpr double kBinEps = 1e-9;
const char* const kSpecials[] = {"<pad>", "<bos>", "<eos>"};

std::string join(std::string_view a, std::string_view b, std::string_view c) {
  std::string out(a);
  out.append("+").append(b).append("+").append(c);
  return out;
}

std::string snapped(const Bins& bins, double v) { return format_number(bins.value(bins.index(v))); }

const Bins& light_bins(const VocabSpec& spec, std::string_view field) {
  if (field == "main_green" || field == "cross_green") return spec.green;
  if (field == "offset") return spec.signal_offset;
  return spec.yellow;
}

json bins_to_json(const Bins& b) { return {{"width", b.width}, {"lo", b.lo}, {"hi", b.hi}}; }

Bins bins_from_json(const json& j, const std::string& path) {
  Bins b{lawforge::detail::require_number(j, "width", path), lawforge::detail::require_number(j, "lo", path),
         lawforge::detail::require_number(j, "hi", path)};
  if (!(b.width > 0.0) || !(b.hi >= b.lo)) throw SchemaError(path, "bad bin definition");
  return b;
}

}  // namespace

std::size_t Bins::count() const {
  return static_cast<std::size_t>(std::floor((hi - lo) / width + kBinEps)) + 1;
}

std::size_t Bins::index(double v) const {
  if (!std::isfinite(v) || v < lo || v > hi) {
    throw RangeError("value " + format_number(v) + " outside quantization range [" +
                     format_number(lo) + ", " + format_number(hi) + "]");
  }
  auto i = static_cast<std::size_t>(std::floor((v - lo) / width + kBinEps));
  return std::min(i, count() - 1);
}

double Bins::value(std::size_t i) const {
  return std::round((lo + static_cast<double>(i) * width) * 1e6) / 1e6;
}

Vocabulary Vocabulary::build(const sim::RoadStructure& road, const VocabSpec& spec) {
  std::vector<std::string> t(std::begin(kSpecials), std::end(kSpecials));
  auto each = [](const Bins& b, auto&& fn) {
    for (std::size_t i = 0; i < b.count(); ++i) fn(format_number(b.value(i)));
  };
  for (int h = 0; h < 24; ++h) {
    each(spec.minute, [&](const std::string& m) { t.push_back(join("time", std::to_string(h), m)); });
  }
  for (const auto& type : weather_types()) {
    each(spec.intensity, [&](const std::string& v) { t.push_back(join("weather", type, v)); });
  }
  for (auto f : detail::kLightFields) {
    each(light_bins(spec, f), [&](const std::string& v) { t.push_back(join("light", f, v)); });
  }
  std::vector<std::string> entities{"ego"};
  for (std::size_t k = 1; k <= spec.max_npcs; ++k) entities.push_back("npc" + std::to_string(k));
  const auto lanes = road.lane_ids();
  for (const auto& e : entities) {
    for (const auto& lane : lanes) {
      each(spec.offset, [&](const std::string& v) { t.push_back(join(e, lane, v)); });
    }
    each(spec.speed, [&](const std::string& v) { t.push_back(join(e, "speed", v)); });
    for (const auto& lane : lanes) t.push_back(join(e, "dest", lane));
    if (e != "ego") {
      each(spec.event_time, [&](const std::string& v) { t.push_back(join(e, "at", v)); });
    }
  }
  for (const auto& cw : road.crosswalk_ids()) {
    each(spec.event_time, [&](const std::string& v) { t.push_back(join("ped", cw, v)); });
  }
  return Vocabulary(road.tag(), spec, std::move(t));
}

Vocabulary::Vocabulary(std::string road, VocabSpec spec, std::vector<std::string> tokens)
    : road_(std::move(road)), spec_(spec), tokens_(std::move(tokens)) {
  if (tokens_.size() < 3) throw InputError("vocabulary lacks special tokens");
  for (int i = 0; i < 3; ++i) {
    if (tokens_[static_cast<std::size_t>(i)] != kSpecials[i]) {
      throw InputError("vocabulary must start with <pad>, <bos>, <eos>");
    }
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw InputError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

const std::string& Vocabulary::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw InputError("token id " + std::to_string(id) + " outside the vocabulary");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::optional<int> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string Vocabulary::quantize(std::string_view token) const {
  const auto p = detail::parse_token(token);
  switch (p.kind) {
    case TokenKind::kTime:
      if (p.hour < 0 || p.hour > 23) throw RangeError("hour " + std::to_string(p.hour) + " outside [0, 23]");
      return join("time", std::to_string(p.hour), snapped(spec_.minute, p.value));
    case TokenKind::kWeather:
      return join("weather", p.key, snapped(spec_.intensity, p.value));
    case TokenKind::kLight:
      return join("light", p.key, snapped(light_bins(spec_, p.key), p.value));
    case TokenKind::kPlace:
      return join(p.entity, p.key, snapped(spec_.offset, p.value));
    case TokenKind::kSpeed:
      return join(p.entity, "speed", snapped(spec_.speed, p.value));
    case TokenKind::kDest:
      return std::string(token);
    case TokenKind::kAt:
      return join(p.entity, "at", snapped(spec_.event_time, p.value));
    case TokenKind::kPed:
      return join("ped", p.key, snapped(spec_.event_time, p.value));
  }
  return std::string(token);
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  return h;
}

void Vocabulary::save(const std::filesystem::path& path) const {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["road"] = road_;
  doc["bins"] = {{"speed", bins_to_json(spec_.speed)},
                 {"offset", bins_to_json(spec_.offset)},
                 {"intensity", bins_to_json(spec_.intensity)},
                 {"minute", bins_to_json(spec_.minute)},
                 {"green", bins_to_json(spec_.green)},
                 {"yellow", bins_to_json(spec_.yellow)},
                 {"signal_offset", bins_to_json(spec_.signal_offset)},
                 {"event_time", bins_to_json(spec_.event_time)}};
  doc["max_npcs"] = spec_.max_npcs;
  doc["tokens"] = tokens_;
  lawforge::detail::write_json_file(path, doc);
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  const json doc = lawforge::detail::read_json_file(path);
  lawforge::detail::check_schema_version(doc, kSchemaVersion);
  VocabSpec spec;
  const auto& b = lawforge::detail::require(doc, "bins", "");
  spec.speed = bins_from_json(lawforge::detail::require(b, "speed", "/bins"), "/bins/speed");
  spec.offset = bins_from_json(lawforge::detail::require(b, "offset", "/bins"), "/bins/offset");
  spec.intensity = bins_from_json(lawforge::detail::require(b, "intensity", "/bins"), "/bins/intensity");
  spec.minute = bins_from_json(lawforge::detail::require(b, "minute", "/bins"), "/bins/minute");
  spec.green = bins_from_json(lawforge::detail::require(b, "green", "/bins"), "/bins/green");
  spec.yellow = bins_from_json(lawforge::detail::require(b, "yellow", "/bins"), "/bins/yellow");
  spec.signal_offset =
      bins_from_json(lawforge::detail::require(b, "signal_offset", "/bins"), "/bins/signal_offset");
  spec.event_time = bins_from_json(lawforge::detail::require(b, "event_time", "/bins"), "/bins/event_time");
  spec.max_npcs = static_cast<std::size_t>(lawforge::detail::require_number(doc, "max_npcs", ""));
  std::vector<std::string> tokens;
  for (const auto& t : lawforge::detail::require_array(doc, "tokens", "")) {
    if (!t.is_string()) throw SchemaError("/tokens", "expected strings");
    tokens.push_back(t.get<std::string>());
  }
  try {
    return Vocabulary(lawforge::detail::require_string(doc, "road", ""), spec, std::move(tokens));
  } catch (const SchemaError&) {
    throw;
  } catch (const InputError& e) {
    throw SchemaError("/tokens", e.what());
  }
}

std::vector<int> tokenize(const ActionSequence& seq, const Vocabulary& vocab) {
  std::vector<int> ids;
  ids.reserve(seq.tokens.size());
  for (const auto& tok : seq.tokens) {
    auto q = vocab.quantize(tok);
    auto id = vocab.find(q);
    if (!id) throw InputError("token '" + q + "' is not in the " + vocab.road() + " vocabulary");
    ids.push_back(*id);
  }
  return ids;
}

ActionSequence detokenize(std::span<const int> ids, const Vocabulary& vocab) {
  ActionSequence seq;
  for (int id : ids) {
    if (id == Vocabulary::kEos) break;
    if (id == Vocabulary::kPad || id == Vocabulary::kBos) continue;
    seq.tokens.push_back(vocab.token(id));
  }
  return seq;
}

}  // namespace lawforge::codec
