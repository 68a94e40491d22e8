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

#include "lawforge/reward.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "../common/json_util.hpp"

namespace lawforge::reward {

namespace {

using detail::json;
constexpr int kSchemaVersion = 1;

// JSON has no infinities; constant-false laws can produce them.
json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

double number_or_inf(const json& j, const std::string& key, const std::string& path) {
  const auto& v = detail::require(j, key, path);
  if (v.is_number()) return v.get<double>();
  if (v == "inf") return INFINITY;
  if (v == "-inf") return -INFINITY;
  throw SchemaError(path + "/" + key, "expected a number");
}

}  // namespace

WeightedCorpus::WeightedCorpus(stl::LawCorpus corpus, std::map<std::string, double> weights)
    : corpus_(std::move(corpus)) {
  for (const auto& law : corpus_.laws()) {
    auto it = weights.find(law.id);
    if (it == weights.end()) throw InputError("no weight for law '" + law.id + "'");
    if (!std::isfinite(it->second) || it->second < 0.0) {
      throw InputError("weight for law '" + law.id + "' must be finite and nonnegative");
    }
    weights_.emplace(law.id, it->second);
  }
}

double WeightedCorpus::weight(std::string_view law_id) const {
  auto it = weights_.find(law_id);
  if (it == weights_.end()) throw InputError("unknown law id '" + std::string(law_id) + "'");
  return it->second;
}

WeightedCorpus WeightedCorpus::with_weight(std::string_view law_id, double w) const {
  std::map<std::string, double> copy(weights_.begin(), weights_.end());
  if (!copy.count(std::string(law_id))) throw InputError("unknown law id '" + std::string(law_id) + "'");
  copy[std::string(law_id)] = w;
  return WeightedCorpus(corpus_, std::move(copy));
}

std::vector<std::string> WeightedCorpus::applicable(std::string_view road) const {
  std::vector<std::string> out;
  for (const auto& law : corpus_.laws()) {
    if (law.applies_to(road)) out.push_back(law.id);
  }
  return out;
}

std::vector<std::string> WeightedCorpus::ids() const {
  std::vector<std::string> out;
  for (const auto& law : corpus_.laws()) out.push_back(law.id);
  return out;
}

RewardRecord score_scenario(const trace::Trace& trace, const WeightedCorpus& laws,
                            const std::vector<std::string>& subset, const stl::MonitorOptions& opts) {
  if (subset.empty()) throw InputError("law subset is empty");
  std::set<std::string> seen;
  RewardRecord rec;
  rec.scenario_id = trace.metadata().scenario_id;
  for (const auto& id : subset) {
    if (!seen.insert(id).second) throw InputError("law '" + id + "' listed twice in the subset");
    const auto& law = laws.corpus().at(id);
    const auto rho = stl::robustness_signal(law.formula, trace, opts);
    if (rho.empty() || std::isnan(rho[0])) {
      throw stl::EvaluationError("law '" + id + "' is undefined at t = 0 on this trace");
    }
    LawScore s;
    s.law_id = id;
    s.robustness_at_start = rho[0];
    s.min_robustness = rho[0];
    std::size_t at = 0;
    for (std::size_t i = 1; i < rho.size(); ++i) {
      if (rho[i] < s.min_robustness) {
        s.min_robustness = rho[i];
        at = i;
      }
    }
    s.attaining_time = static_cast<double>(at) * trace.step();
    s.weight = laws.weight(id);
    s.weighted = s.min_robustness < 0.0 && s.weight > 0.0 ? s.weight * -s.min_robustness : 0.0;
    if (s.weighted > rec.overall) {
      rec.overall = s.weighted;
      rec.attributed_law = id;
    }
    rec.entries.push_back(std::move(s));
  }
  return rec;
}

void store_rewards(const std::vector<RewardRecord>& records, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (const auto& r : records) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario_id"] = r.scenario_id;
    j["overall"] = finite_or_string(r.overall);
    j["attributed_law"] = r.attributed_law ? json(*r.attributed_law) : json(nullptr);
    j["laws"] = json::array();
    for (const auto& e : r.entries) {
      j["laws"].push_back({{"law_id", e.law_id},
                           {"robustness_at_start", finite_or_string(e.robustness_at_start)},
                           {"min_robustness", finite_or_string(e.min_robustness)},
                           {"attaining_time", e.attaining_time},
                           {"weight", e.weight},
                           {"weighted", finite_or_string(e.weighted)}});
    }
    out << j.dump() << '\n';
  }
}

std::vector<RewardRecord> load_rewards(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<RewardRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string p = "/" + std::to_string(n++);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(p, std::string("not valid JSON: ") + e.what());
    }
    detail::check_schema_version(j, kSchemaVersion, p);
    RewardRecord r;
    r.scenario_id = detail::require_string(j, "scenario_id", p);
    r.overall = number_or_inf(j, "overall", p);
    if (auto it = j.find("attributed_law"); it != j.end() && it->is_string()) r.attributed_law = *it;
    const auto& laws = detail::require_array(j, "laws", p);
    for (std::size_t i = 0; i < laws.size(); ++i) {
      const std::string lp = p + "/laws/" + std::to_string(i);
      LawScore s;
      s.law_id = detail::require_string(laws[i], "law_id", lp);
      s.robustness_at_start = number_or_inf(laws[i], "robustness_at_start", lp);
      s.min_robustness = number_or_inf(laws[i], "min_robustness", lp);
      s.attaining_time = detail::require_number(laws[i], "attaining_time", lp);
      s.weight = detail::require_number(laws[i], "weight", lp);
      s.weighted = number_or_inf(laws[i], "weighted", lp);
      r.entries.push_back(std::move(s));
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace lawforge::reward
