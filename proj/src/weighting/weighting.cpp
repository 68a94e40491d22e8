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

#include "lawforge/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <set>

#include "../common/json_util.hpp"

namespace lawforge::weighting {

namespace {

using detail::json;
constexpr int kSchemaVersion = 1;

bool in_range(double v) { return std::isfinite(v) && v >= 0.0 && v <= kMaxScore; }

struct Outcome {
  std::optional<RiskAssessment> assessment;
  std::optional<ScoringFailure> failure;
  std::optional<TokenUsage> usage;
  ValidationFlags flags;
};

Outcome assess_one(const stl::LawSpec& law, const Scorer& scorer, int max_attempts) {
  Outcome out;
  std::string reason;
  int attempt = 0;
  for (; attempt < max_attempts; ++attempt) {
    try {
      RawScore raw = scorer.score(law);
      if (raw.usage) {
        if (!out.usage) out.usage = TokenUsage{};
        out.usage->prompt_tokens += raw.usage->prompt_tokens;
        out.usage->completion_tokens += raw.usage->completion_tokens;
      }
      if (!in_range(raw.severity) || !in_range(raw.occurrence)) {
        out.flags.range = false;
        reason = "score out of range (S=" + std::to_string(raw.severity) +
                 ", O=" + std::to_string(raw.occurrence) + ")";
        continue;
      }
      out.assessment = RiskAssessment{law.id,
                                      raw.severity,
                                      raw.occurrence,
                                      std::move(raw.justification),
                                      scorer.id(),
                                      compute_weight(raw.severity, raw.occurrence)};
      return out;
    } catch (const MalformedResponse& e) {
      out.flags.syntactic = false;
      reason = std::string("malformed response: ") + e.what();
    } catch (const TransportError& e) {
      reason = std::string("transport failure: ") + e.what();
    }
  }
  out.failure = ScoringFailure{law.id, reason, attempt};
  return out;
}

}  // namespace

double compute_weight(double severity, double occurrence) {
  if (!in_range(severity)) throw InputError("severity " + std::to_string(severity) + " outside [0, 4]");
  if (!in_range(occurrence)) {
    throw InputError("occurrence " + std::to_string(occurrence) + " outside [0, 4]");
  }
  return severity * occurrence / 4.0;
}

const RiskAssessment* ScorerReport::find(std::string_view law_id) const {
  for (const auto& a : assessments) {
    if (a.law_id == law_id) return &a;
  }
  return nullptr;
}

std::map<std::string, double> ScorerReport::weights() const {
  std::map<std::string, double> out;
  for (const auto& a : assessments) out[a.law_id] = a.weight;
  return out;
}

ScorerReport assess_corpus(const stl::LawCorpus& corpus, const Scorer& scorer,
                           const AssessOptions& opts) {
  if (opts.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  scorer.check_coverage(corpus);
  const auto& laws = corpus.laws();
  std::vector<Outcome> outcomes(laws.size());
  const std::size_t width = std::max<std::size_t>(1, opts.concurrency);
  if (width == 1) {
    for (std::size_t i = 0; i < laws.size(); ++i) {
      outcomes[i] = assess_one(laws[i], scorer, opts.max_attempts);
    }
  } else {
    for (std::size_t base = 0; base < laws.size(); base += width) {
      std::vector<std::future<Outcome>> batch;
      for (std::size_t i = base; i < std::min(laws.size(), base + width); ++i) {
        batch.push_back(std::async(std::launch::async, assess_one, std::cref(laws[i]),
                                   std::cref(scorer), opts.max_attempts));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) outcomes[base + k] = batch[k].get();
    }
  }

  ScorerReport report;
  report.scorer = scorer.id();
  for (auto& o : outcomes) {
    if (o.assessment) report.assessments.push_back(std::move(*o.assessment));
    if (o.failure) report.failures.push_back(std::move(*o.failure));
    if (o.usage) {
      if (!report.usage) report.usage = TokenUsage{};
      report.usage->prompt_tokens += o.usage->prompt_tokens;
      report.usage->completion_tokens += o.usage->completion_tokens;
    }
    report.flags.syntactic = report.flags.syntactic && o.flags.syntactic;
    report.flags.range = report.flags.range && o.flags.range;
  }
  return report;
}

ScorerReport apply_overrides(ScorerReport report, const ScoreTable& overrides) {
  for (const auto& [id, entry] : overrides.entries) {
    RiskAssessment a{id,
                     entry.severity,
                     entry.occurrence,
                     entry.justification.empty() ? "expert override" : entry.justification,
                     "override",
                     compute_weight(entry.severity, entry.occurrence)};
    auto it = std::find_if(report.assessments.begin(), report.assessments.end(),
                           [&](const RiskAssessment& r) { return r.law_id == id; });
    if (it != report.assessments.end()) {
      *it = std::move(a);
      continue;
    }
    auto f = std::find_if(report.failures.begin(), report.failures.end(),
                          [&](const ScoringFailure& r) { return r.law_id == id; });
    if (f == report.failures.end()) throw InputError("override for unknown law '" + id + "'");
    report.failures.erase(f);
    report.assessments.push_back(std::move(a));
  }
  return report;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("spearman needs two equal series of length >= 2");
  auto rx = average_ranks(x), ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

Consistency consistency(const ScorerReport& a, const ScorerReport& b) {
  auto wa = a.weights(), wb = b.weights();
  if (wa.size() != a.assessments.size() || wb.size() != b.assessments.size()) {
    throw InputError("report lists a law more than once");
  }
  std::set<std::string> ka, kb;
  for (const auto& [k, v] : wa) ka.insert(k);
  for (const auto& [k, v] : wb) kb.insert(k);
  if (ka != kb) throw InputError("reports cover different law sets");
  if (ka.size() < 2) throw InputError("consistency needs at least two laws");
  std::vector<double> x, y;
  double abs_sum = 0.0;
  for (const auto& [k, v] : wa) {
    x.push_back(v);
    y.push_back(wb.at(k));
    abs_sum += std::abs(v - wb.at(k));
  }
  return {spearman(x, y), abs_sum / static_cast<double>(x.size())};
}

void store_report(const ScorerReport& report, const std::filesystem::path& path) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["scorer"] = report.scorer;
  doc["assessments"] = json::array();
  for (const auto& a : report.assessments) {
    doc["assessments"].push_back({{"law_id", a.law_id},
                                  {"severity", a.severity},
                                  {"occurrence", a.occurrence},
                                  {"weight", a.weight},
                                  {"justification", a.justification},
                                  {"scorer", a.scorer}});
  }
  doc["failures"] = json::array();
  for (const auto& f : report.failures) {
    doc["failures"].push_back({{"law_id", f.law_id}, {"reason", f.reason}, {"attempts", f.attempts}});
  }
  doc["validation"] = {{"syntactic", report.flags.syntactic}, {"range", report.flags.range}};
  if (report.usage) {
    doc["usage"] = {{"prompt_tokens", report.usage->prompt_tokens},
                    {"completion_tokens", report.usage->completion_tokens}};
  } else {
    doc["usage"] = nullptr;
  }
  detail::write_json_file(path, doc);
}

ScorerReport load_report(const std::filesystem::path& path) {
  const json doc = detail::read_json_file(path);
  detail::check_schema_version(doc, kSchemaVersion);
  ScorerReport r;
  r.scorer = detail::require_string(doc, "scorer", "");
  const auto& arr = detail::require_array(doc, "assessments", "");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = "/assessments/" + std::to_string(i);
    RiskAssessment a;
    a.law_id = detail::require_string(arr[i], "law_id", p);
    a.severity = detail::require_number(arr[i], "severity", p);
    a.occurrence = detail::require_number(arr[i], "occurrence", p);
    a.weight = detail::require_number(arr[i], "weight", p);
    a.justification = arr[i].value("justification", std::string());
    a.scorer = arr[i].value("scorer", r.scorer);
    if (!in_range(a.severity) || !in_range(a.occurrence)) throw SchemaError(p, "score outside [0, 4]");
    if (a.weight != compute_weight(a.severity, a.occurrence)) {
      throw SchemaError(p + "/weight", "weight is not S*O/4");
    }
    r.assessments.push_back(std::move(a));
  }
  if (auto it = doc.find("failures"); it != doc.end() && it->is_array()) {
    for (const auto& f : *it) {
      r.failures.push_back({f.value("law_id", std::string()), f.value("reason", std::string()),
                            f.value("attempts", 0)});
    }
  }
  if (auto it = doc.find("validation"); it != doc.end() && it->is_object()) {
    r.flags.syntactic = it->value("syntactic", true);
    r.flags.range = it->value("range", true);
  }
  if (auto it = doc.find("usage"); it != doc.end() && it->is_object()) {
    r.usage = TokenUsage{it->value("prompt_tokens", 0L), it->value("completion_tokens", 0L)};
  }
  return r;
}

}  // namespace lawforge::weighting
