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
#include <fstream>
#include <string>

#include "../common/json_util.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::trace {

namespace {

using detail::json;
constexpr int kSchemaVersion = 1;

}  // namespace

void write_trace(const Trace& trace, std::ostream& out) {
  json header;
  header["schema_version"] = kSchemaVersion;
  header["record"] = "header";
  header["step"] = trace.step();
  header["duration"] = trace.duration();
  header["length"] = trace.length();
  json decls = json::object();
  for (const auto& [name, sig] : trace.signals()) {
    if (sig.is_numeric()) {
      decls[name] = {{"type", "numeric"}};
    } else {
      decls[name] = {{"type", "categorical"}, {"alphabet", sig.alphabet()}};
    }
  }
  header["signals"] = std::move(decls);
  const auto& meta = trace.metadata();
  header["metadata"] = {{"scenario_id", meta.scenario_id},
                        {"seed", meta.seed},
                        {"termination", meta.termination}};
  out << header.dump() << '\n';

  for (std::size_t i = 0; i < trace.length(); ++i) {
    json values = json::object();
    for (const auto& [name, sig] : trace.signals()) {
      if (sig.is_numeric()) {
        double v = sig.values()[i];
        if (!std::isfinite(v)) {
          throw InputError("signal '" + name + "' has a non-finite sample at index " +
                           std::to_string(i));
        }
        values[name] = v;
      } else {
        values[name] = sig.alphabet()[sig.codes()[i]];
      }
    }
    json rec;
    rec["t_index"] = i;
    rec["signals"] = std::move(values);
    out << rec.dump() << '\n';
  }
}

void store_trace(const Trace& trace, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_trace(trace, out);
}

Trace read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("", "empty trace file");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError("/0", std::string("header is not valid JSON: ") + e.what());
  }
  detail::check_schema_version(header, kSchemaVersion, "/0");
  const double step = detail::require_number(header, "step", "/0");
  if (!(step > 0.0)) throw SchemaError("/0/step", "time step must be positive");
  const double duration = detail::require_number(header, "duration", "/0");
  const auto& decls = detail::require(header, "signals", "/0");
  if (!decls.is_object()) throw SchemaError("/0/signals", "expected an object");

  struct Column {
    bool numeric;
    std::vector<std::string> alphabet;
    std::vector<double> values;
    std::vector<std::uint32_t> codes;
  };
  std::map<std::string, Column, std::less<>> columns;
  for (const auto& [name, decl] : decls.items()) {
    const std::string path = "/0/signals/" + name;
    auto type = detail::require_string(decl, "type", path);
    if (type == "numeric") {
      columns.emplace(name, Column{true, {}, {}, {}});
    } else if (type == "categorical") {
      const auto& alpha = detail::require_array(decl, "alphabet", path);
      Column col{false, {}, {}, {}};
      for (const auto& a : alpha) {
        if (!a.is_string()) throw SchemaError(path + "/alphabet", "expected strings");
        col.alphabet.push_back(a.get<std::string>());
      }
      columns.emplace(name, std::move(col));
    } else {
      throw SchemaError(path + "/type", "unknown signal type '" + type + "'");
    }
  }

  TraceMetadata meta;
  if (auto it = header.find("metadata"); it != header.end() && it->is_object()) {
    meta.scenario_id = it->value("scenario_id", "");
    meta.seed = it->value("seed", std::uint64_t{0});
    meta.termination = it->value("termination", "");
  }

  std::size_t ticks = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::string path = "/" + std::to_string(lineno++);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(path, std::string("record is not valid JSON: ") + e.what());
    }
    const auto& idx = detail::require(rec, "t_index", path);
    if (!idx.is_number_unsigned() || idx.get<std::size_t>() != ticks) {
      throw SchemaError(path + "/t_index", "expected consecutive tick index " +
                                               std::to_string(ticks));
    }
    const auto& values = detail::require(rec, "signals", path);
    if (!values.is_object()) throw SchemaError(path + "/signals", "expected an object");
    for (const auto& [name, v] : values.items()) {
      auto it = columns.find(name);
      if (it == columns.end()) {
        throw SchemaError(path + "/signals/" + name, "signal not declared in header");
      }
      auto& col = it->second;
      if (col.numeric) {
        if (!v.is_number()) throw SchemaError(path + "/signals/" + name, "expected a number");
        col.values.push_back(v.get<double>());
      } else {
        if (!v.is_string()) throw SchemaError(path + "/signals/" + name, "expected a string");
        auto sym = v.get<std::string>();
        auto a = std::find(col.alphabet.begin(), col.alphabet.end(), sym);
        if (a == col.alphabet.end()) {
          throw SchemaError(path + "/signals/" + name, "'" + sym + "' not in declared alphabet");
        }
        col.codes.push_back(static_cast<std::uint32_t>(a - col.alphabet.begin()));
      }
    }
    ++ticks;
  }

  std::vector<Signal> signals;
  for (auto& [name, col] : columns) {
    const std::size_t n = col.numeric ? col.values.size() : col.codes.size();
    if (n != ticks) {
      throw SchemaError("/0/signals/" + name,
                        "length mismatch: " + std::to_string(n) + " samples for " +
                            std::to_string(ticks) + " ticks");
    }
    if (col.numeric) {
      signals.push_back(Signal::numeric(name, std::move(col.values)));
    } else {
      signals.push_back(Signal::categorical(name, std::move(col.alphabet), std::move(col.codes)));
    }
  }
  if (auto it = header.find("length"); it != header.end()) {
    if (!it->is_number_unsigned() || it->get<std::size_t>() != ticks) {
      throw SchemaError("/0/length", "length mismatch: header declares " + it->dump() +
                                         " ticks, file has " + std::to_string(ticks));
    }
  }
  if (std::abs(duration - static_cast<double>(ticks) * step) > 1e-9 * std::max(1.0, duration)) {
    throw SchemaError("/0/duration", "duration does not equal length * step");
  }
  return Trace(step, std::move(signals), std::move(meta));
}

Trace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_trace(in);
}

}  // namespace lawforge::trace
