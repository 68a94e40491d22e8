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

#include "lawforge/law.hpp"

#include <algorithm>
#include <regex>

#include "../common/json_util.hpp"

namespace lawforge::stl {

namespace {

using detail::json;
constexpr int kSchemaVersion = 1;

LawCorpus from_json(const json& doc) {
  detail::check_schema_version(doc, kSchemaVersion);
  const auto& laws = detail::require_array(doc, "laws", "");
  static const std::regex id_re("[A-Za-z_][A-Za-z0-9_]*");
  std::vector<LawSpec> out;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const std::string path = "/laws/" + std::to_string(i);
    const auto& l = laws[i];
    LawSpec spec;
    spec.id = detail::require_string(l, "id", path);
    if (!std::regex_match(spec.id, id_re)) throw SchemaError(path + "/id", "malformed law id");
    spec.article = detail::require_string(l, "article", path);
    spec.description = detail::require_string(l, "description", path);
    const auto text = detail::require_string(l, "formula", path);
    try {
      spec.formula = parse_formula(text);
    } catch (const ParseError& e) {
      throw SchemaError(path + "/formula", e.what());
    }
    if (auto it = l.find("penalty_points"); it != l.end()) {
      if (!it->is_number_integer()) throw SchemaError(path + "/penalty_points", "expected an integer");
      spec.penalty_points = it->get<int>();
    }
    if (auto it = l.find("roads"); it != l.end()) {
      if (!it->is_array()) throw SchemaError(path + "/roads", "expected an array");
      for (const auto& r : *it) spec.roads.insert(r.get<std::string>());
    }
    out.push_back(std::move(spec));
  }
  return LawCorpus(std::move(out));
}

}  // namespace

LawCorpus::LawCorpus(std::vector<LawSpec> laws) : laws_(std::move(laws)) {
  std::set<std::string> seen;
  for (const auto& l : laws_) {
    if (!seen.insert(l.id).second) throw InputError("duplicate law id '" + l.id + "'");
  }
}

const LawSpec& LawCorpus::at(std::string_view id) const {
  auto it = std::find_if(laws_.begin(), laws_.end(), [&](const LawSpec& l) { return l.id == id; });
  if (it == laws_.end()) throw InputError("unknown law id '" + std::string(id) + "'");
  return *it;
}

bool LawCorpus::contains(std::string_view id) const {
  return std::any_of(laws_.begin(), laws_.end(), [&](const LawSpec& l) { return l.id == id; });
}

std::set<std::string> LawCorpus::required_signals(std::string_view speed_signal) const {
  std::set<std::string> out;
  for (const auto& l : laws_) {
    auto s = stl::required_signals(l.formula, speed_signal);
    out.insert(s.begin(), s.end());
  }
  return out;
}

LawCorpus load_corpus(const std::filesystem::path& path) {
  return from_json(detail::read_json_file(path));
}

LawCorpus parse_corpus(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("law corpus is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

}  // namespace lawforge::stl
