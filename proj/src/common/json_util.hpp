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

// Small helpers for schema-checked JSON reading. Internal to the library.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "lawforge/error.hpp"

namespace lawforge::detail {

using nlohmann::json;

inline const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) throw SchemaError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(path + "/" + key, "missing required field");
  return *it;
}

inline double require_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

inline std::string require_string(const json& obj, const std::string& key,
                                  const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline const json& require_array(const json& obj, const std::string& key,
                                 const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_array()) throw SchemaError(path + "/" + key, "expected an array");
  return v;
}

inline void check_schema_version(const json& doc, int expected, const std::string& path = "") {
  const auto& v = require(doc, "schema_version", path);
  if (!v.is_number_integer() || v.get<int>() != expected) {
    throw SchemaError(path + "/schema_version",
                      "unsupported schema version (expected " + std::to_string(expected) + ")");
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("", "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::filesystem::path& path, const json& doc) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace lawforge::detail
