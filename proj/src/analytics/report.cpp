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
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "../common/json_util.hpp"
#include "lawforge/analytics.hpp"
#include "lawforge/scenario.hpp"

namespace lawforge::analytics {

namespace {

constexpr int kSchemaVersion = 1;

bool is_number(std::string_view s) {
  double v;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json();
}

double read_number_or_nan(const nlohmann::json& j, const std::string& key, const std::string& path) {
  const auto& v = detail::require(j, key, path);
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw SchemaError(path + "/" + key, "expected a number");
  return v.get<double>();
}

}  // namespace

std::string token_stem(std::string_view token) {
  std::string_view s = token;
  while (true) {
    const auto pos = s.rfind('+');
    if (pos == std::string_view::npos || !is_number(s.substr(pos + 1))) break;
    s = s.substr(0, pos);
  }
  return std::string(s);
}

std::vector<std::string> core_vocabulary(const codec::Vocabulary& vocab) {
  std::set<std::string> stems;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const int id = static_cast<int>(i);
    if (!vocab.is_special(id)) stems.insert(token_stem(vocab.token(id)));
  }
  return {stems.begin(), stems.end()};
}

Validity validity(std::span<const codec::ActionSequence> sequences, const sim::RoadStructure& road) {
  Validity v;
  v.total = sequences.size();
  for (const auto& seq : sequences) {
    codec::DecodeResult r;
    try {
      r = codec::decode(seq, road);
    } catch (const codec::DecodeError&) {
      continue;
    }
    ++v.complete;
    if (!r.clamped.empty()) continue;
    try {
      check_invariants(r.scenario, road);
    } catch (const InputError&) {
      continue;
    }
    if (constraint_violations(r.scenario, road).empty()) ++v.satisfied;
  }
  if (v.total > 0) v.completeness = static_cast<double>(v.complete) / static_cast<double>(v.total);
  if (v.complete > 0) v.satisfaction = static_cast<double>(v.satisfied) / static_cast<double>(v.complete);
  return v;
}

TrajectorySet extract_trajectories(std::span<const trace::Trace> traces, const std::string& road,
                                   double stride) {
  if (!(stride > 0.0)) throw ConfigError("trajectory stride must be positive");
  TrajectorySet set;
  set.road = road;
  for (const auto& tr : traces) {
    if (tr.length() == 0) continue;
    const auto every = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(stride / tr.step())));
    for (const auto& [name, sig] : tr.signals()) {
      if (name.rfind("npc", 0) != 0 || name.size() < 3 || name.substr(name.size() - 2) != ".x") continue;
      const std::string id = name.substr(0, name.size() - 2);
      if (!tr.has(id + ".y")) continue;
      const auto xs = sig.values();
      const auto ys = tr.signal(id + ".y").values();
      Path p;
      for (std::size_t i = 0; i < xs.size(); i += every) p.push_back({xs[i], ys[i]});
      if ((xs.size() - 1) % every != 0) p.push_back({xs.back(), ys.back()});
      set.npcs[id].push_back(std::move(p));
    }
  }
  return set;
}

std::map<std::string, std::vector<double>> pairwise_dtw(const TrajectorySet& set, double q,
                                                        std::size_t threads) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& [id, paths] : set.npcs) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (std::size_t j = i + 1; j < paths.size(); ++j) pairs.emplace_back(i, j);
    }
    std::vector<double> values(pairs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k; (k = next.fetch_add(1)) < pairs.size();) {
        values[k] = dtw(paths[pairs[k].first], paths[pairs[k].second], q);
      }
    };
    const std::size_t n = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(pairs.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    out[id] = std::move(values);
  }
  return out;
}

void store_trajectories(const TrajectorySet& set, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["road"] = set.road;
  auto& npcs = j["npcs"] = nlohmann::json::object();
  for (const auto& [id, paths] : set.npcs) {
    auto& list = npcs[id] = nlohmann::json::array();
    for (const auto& p : paths) {
      nlohmann::json pts = nlohmann::json::array();
      for (const auto& pt : p) pts.push_back({pt.x, pt.y});
      list.push_back(std::move(pts));
    }
  }
  detail::write_json_file(path, j);
}

TrajectorySet load_trajectories(const std::filesystem::path& path) {
  const auto j = detail::read_json_file(path);
  detail::check_schema_version(j, kSchemaVersion);
  TrajectorySet set;
  set.road = detail::require_string(j, "road", "");
  const auto& npcs = detail::require(j, "npcs", "");
  if (!npcs.is_object()) throw SchemaError("/npcs", "expected an object");
  for (const auto& [id, list] : npcs.items()) {
    const std::string p = "/npcs/" + id;
    if (!list.is_array()) throw SchemaError(p, "expected an array of paths");
    auto& paths = set.npcs[id];
    for (const auto& path_j : list) {
      if (!path_j.is_array() || path_j.empty()) throw SchemaError(p, "expected a nonempty array of points");
      Path pts;
      for (const auto& pt : path_j) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
          throw SchemaError(p, "expected [x, y] points");
        }
        pts.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
      paths.push_back(std::move(pts));
    }
  }
  return set;
}

MetricReport build_report(std::span<const codec::ActionSequence> sequences,
                          const sim::RoadStructure& road, const codec::Vocabulary& vocab,
                          std::span<const trace::Trace> traces, const ReportOptions& opts) {
  if (traces.empty()) return build_report(sequences, road, vocab, nullptr, opts);
  const auto set = extract_trajectories(traces, road.tag(), opts.stride);
  return build_report(sequences, road, vocab, &set, opts);
}

MetricReport build_report(std::span<const codec::ActionSequence> sequences,
                          const sim::RoadStructure& road, const codec::Vocabulary& vocab,
                          const TrajectorySet* trajectories, const ReportOptions& opts) {
  if (sequences.empty()) throw InputError("metric report: no sequences");
  MetricReport r;
  r.road = road.tag();
  r.samples = sequences.size();
  std::vector<Sentence> sentences;
  std::vector<Sentence> stems;
  for (const auto& s : sequences) {
    sentences.push_back(s.tokens);
    Sentence st;
    for (const auto& t : s.tokens) st.push_back(token_stem(t));
    stems.push_back(std::move(st));
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 1; n <= 3; ++n) {
    try {
      r.distinct[n - 1] = distinct_n(sentences, n);
    } catch (const InputError&) {
      r.distinct[n - 1] = nan;
    }
  }
  r.self_bleu = sentences.size() >= 2 ? self_bleu(sentences, opts.bleu) : nan;
  const bool any_token = std::any_of(sentences.begin(), sentences.end(), [](const Sentence& s) { return !s.empty(); });
  r.entropy = any_token ? entropy(sentences) : nan;
  r.coverage = coverage(stems, core_vocabulary(vocab));
  const Validity v = validity(sequences, road);
  r.completeness = v.completeness;
  r.satisfaction = v.satisfaction;
  if (trajectories) {
    for (auto& [id, values] : pairwise_dtw(*trajectories, opts.dtw_order, opts.threads)) {
      if (!values.empty()) r.dtw[id] = quartiles(std::move(values));
    }
  }
  return r;
}

void store_report(const MetricReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["road"] = r.road;
  j["samples"] = r.samples;
  j["distinct"] = {number_or_null(r.distinct[0]), number_or_null(r.distinct[1]), number_or_null(r.distinct[2])};
  j["self_bleu"] = number_or_null(r.self_bleu);
  j["entropy"] = number_or_null(r.entropy);
  j["coverage"] = r.coverage;
  j["completeness"] = r.completeness;
  j["satisfaction"] = r.satisfaction;
  auto& d = j["dtw"] = nlohmann::json::object();
  for (const auto& [id, q] : r.dtw) d[id] = q;
  detail::write_json_file(path, j);
}

MetricReport load_report(const std::filesystem::path& path) {
  const auto j = detail::read_json_file(path);
  detail::check_schema_version(j, kSchemaVersion);
  MetricReport r;
  r.road = detail::require_string(j, "road", "");
  r.samples = static_cast<std::size_t>(detail::require_number(j, "samples", ""));
  const auto& dist = detail::require_array(j, "distinct", "");
  if (dist.size() != 3) throw SchemaError("/distinct", "expected three values");
  for (std::size_t i = 0; i < 3; ++i) {
    r.distinct[i] = dist[i].is_null() ? std::numeric_limits<double>::quiet_NaN() : dist[i].get<double>();
  }
  r.self_bleu = read_number_or_nan(j, "self_bleu", "");
  r.entropy = read_number_or_nan(j, "entropy", "");
  r.coverage = detail::require_number(j, "coverage", "");
  r.completeness = detail::require_number(j, "completeness", "");
  r.satisfaction = detail::require_number(j, "satisfaction", "");
  const auto& d = detail::require(j, "dtw", "");
  if (!d.is_object()) throw SchemaError("/dtw", "expected an object");
  for (const auto& [id, q] : d.items()) {
    if (!q.is_array() || q.size() != 5) throw SchemaError("/dtw/" + id, "expected five values");
    for (std::size_t i = 0; i < 5; ++i) r.dtw[id][i] = q[i].get<double>();
  }
  return r;
}

}  // namespace lawforge::analytics
