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

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "../common/json_util.hpp"
#include "lawforge/weighting.hpp"

namespace lawforge::weighting {

namespace {

using detail::json;

struct Value {
  bool is_string = false;
  double number = 0.0;
  std::string text;
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw SchemaError("line " + std::to_string(line), what);
}

// Parses a value and returns it; `rest` receives whatever follows it.
Value parse_value(std::string_view s, std::size_t line, std::string_view& rest) {
  Value v;
  if (!s.empty() && s[0] == '"') {
    v.is_string = true;
    std::size_t i = 1;
    for (; i < s.size() && s[i] != '"'; ++i) {
      if (s[i] == '\\') {
        if (++i >= s.size()) break;
        switch (s[i]) {
          case 'n': v.text += '\n'; break;
          case 't': v.text += '\t'; break;
          case '"': v.text += '"'; break;
          case '\\': v.text += '\\'; break;
          default: fail(line, "unsupported escape");
        }
      } else {
        v.text += s[i];
      }
    }
    if (i >= s.size()) fail(line, "unterminated string");
    rest = s.substr(i + 1);
    return v;
  }
  std::size_t end = 0;
  while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])) && s[end] != '#') ++end;
  std::string_view tok = s.substr(0, end);
  rest = s.substr(end);
  if (tok.empty()) fail(line, "missing value");
  const char* b = tok.data();
  if (*b == '+') ++b;
  auto res = std::from_chars(b, tok.data() + tok.size(), v.number);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v.number)) {
    fail(line, "expected a number or a quoted string, got '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

ScoreTable parse_score_table(std::string_view text) {
  ScoreTable table;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line = 0;
  std::string section;
  std::set<std::string> seen_keys;
  auto finish_section = [&]() {
    if (section.empty()) return;
    if (!seen_keys.count("severity") || !seen_keys.count("occurrence")) {
      throw SchemaError("/" + section, "needs both severity and occurrence");
    }
  };
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s[0] == '[') {
      auto close = s.find(']');
      if (close == std::string::npos) fail(line, "unterminated table header");
      std::string rest = trim(std::string_view(s).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') fail(line, "trailing characters after table header");
      finish_section();
      section = trim(std::string_view(s).substr(1, close - 1));
      if (section.empty()) fail(line, "empty table name");
      if (table.entries.count(section)) fail(line, "duplicate table [" + section + "]");
      table.entries[section];
      seen_keys.clear();
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    std::string key = trim(std::string_view(s).substr(0, eq));
    std::string_view rest;
    Value v = parse_value(trim(std::string_view(s).substr(eq + 1)), line, rest);
    std::string tail = trim(rest);
    if (!tail.empty() && tail[0] != '#') fail(line, "trailing characters after value");
    if (!seen_keys.insert(key).second) fail(line, "duplicate key '" + key + "'");
    if (section.empty()) {
      if (key != "scorer" || !v.is_string) fail(line, "only `scorer = \"...\"` may precede the tables");
      table.name = v.text;
      continue;
    }
    auto& e = table.entries[section];
    if (key == "severity" || key == "occurrence") {
      if (v.is_string) fail(line, key + " must be a number");
      (key == "severity" ? e.severity : e.occurrence) = v.number;
    } else if (key == "justification") {
      if (!v.is_string) fail(line, "justification must be a string");
      e.justification = v.text;
    } else {
      fail(line, "unknown key '" + key + "'");
    }
  }
  finish_section();
  return table;
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    const json doc = detail::read_json_file(path);
    detail::check_schema_version(doc, 1);
    ScoreTable t;
    t.name = doc.value("scorer", std::string("table"));
    const auto& laws = detail::require(doc, "laws", "");
    if (!laws.is_object()) throw SchemaError("/laws", "expected an object");
    for (const auto& [id, e] : laws.items()) {
      const std::string p = "/laws/" + id;
      t.entries[id] = {detail::require_number(e, "severity", p), detail::require_number(e, "occurrence", p),
                       e.value("justification", std::string())};
    }
    return t;
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_score_table(buf.str());
}

void RuleTableScorer::check_coverage(const stl::LawCorpus& corpus) const {
  std::string missing;
  for (const auto& law : corpus.laws()) {
    if (!table_.entries.count(law.id)) missing += (missing.empty() ? "" : ", ") + law.id;
  }
  if (!missing.empty()) throw UncoveredLawError("score table '" + table_.name + "' does not cover: " + missing);
}

RawScore RuleTableScorer::score(const stl::LawSpec& law) const {
  auto it = table_.entries.find(law.id);
  if (it == table_.entries.end()) throw UncoveredLawError("score table does not cover " + law.id);
  const auto& e = it->second;
  return {e.severity, e.occurrence,
          e.justification.empty() ? "rule table entry" : e.justification, std::nullopt};
}

}  // namespace lawforge::weighting
