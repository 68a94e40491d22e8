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

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lawforge/error.hpp"
#include "lawforge/law.hpp"

namespace lawforge::weighting {

inline constexpr double kMaxScore = 4.0;

// w = S * O / 4. Throws InputError when a score is outside [0, 4].
double compute_weight(double severity, double occurrence);

struct RiskAssessment {
  std::string law_id;
  double severity = 0.0;
  double occurrence = 0.0;
  std::string justification;
  std::string scorer;
  double weight = 0.0;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct ValidationFlags {
  bool syntactic = true;  // every response parsed against the response schema
  bool range = true;      // every score fell inside [0, 4]
};

struct ScoringFailure {
  std::string law_id;
  std::string reason;
  int attempts = 0;
};

struct ScorerReport {
  std::string scorer;
  std::vector<RiskAssessment> assessments;  // corpus order
  std::vector<ScoringFailure> failures;
  std::optional<TokenUsage> usage;
  ValidationFlags flags;

  bool complete() const { return failures.empty(); }
  const RiskAssessment* find(std::string_view law_id) const;
  std::map<std::string, double> weights() const;
};

// What a scorer hands back for one law, before validation.
struct RawScore {
  double severity = 0.0;
  double occurrence = 0.0;
  std::string justification;
  std::optional<TokenUsage> usage;
};

class TransportError : public StageError {
 public:
  using StageError::StageError;
};

class MalformedResponse : public StageError {
 public:
  using StageError::StageError;
};

class UncoveredLawError : public InputError {
 public:
  using InputError::InputError;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string id() const = 0;
  // Called once before scoring; throws when the scorer cannot serve a law.
  virtual void check_coverage(const stl::LawCorpus&) const {}
  // Must be safe to call from several threads at once.
  virtual RawScore score(const stl::LawSpec& law) const = 0;
};

struct ScoreEntry {
  double severity = 0.0;
  double occurrence = 0.0;
  std::string justification;
};

// Law id -> (S, O). Parsed from a small TOML subset:
//   [law38_3]
//   severity = 4.0
//   occurrence = 3.0
//   justification = "..."
// A top-level `scorer = "..."` key names the table.
struct ScoreTable {
  std::string name = "table";
  std::map<std::string, ScoreEntry> entries;
};

ScoreTable parse_score_table(std::string_view text);
// .toml files use the subset above; .json files hold
// {"schema_version":1,"scorer":...,"laws":{id:{severity,occurrence,justification?}}}.
ScoreTable load_score_table(const std::filesystem::path& path);

class RuleTableScorer : public Scorer {
 public:
  explicit RuleTableScorer(ScoreTable table) : table_(std::move(table)) {}
  std::string id() const override { return table_.name; }
  void check_coverage(const stl::LawCorpus& corpus) const override;
  RawScore score(const stl::LawSpec& law) const override;

 private:
  ScoreTable table_;
};

struct RemoteConfig {
  std::string url;  // http://host:port/path
  std::string api_key;
  std::string model;
  double timeout_seconds = 30.0;
};

// Reads {"url", "api_key"?, "model"?, "timeout_seconds"?} and applies the
// LAWFORGE_SCORER_URL / LAWFORGE_SCORER_KEY environment overrides.
RemoteConfig load_remote_config(const std::filesystem::path& path);
RemoteConfig apply_env_overrides(RemoteConfig cfg);

// Posts one JSON request per law and expects
// {"severity", "occurrence", "justification", "usage"?} back.
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(RemoteConfig cfg);
  std::string id() const override;
  RawScore score(const stl::LawSpec& law) const override;

  static std::string rubric();

 private:
  RemoteConfig cfg_;
  std::string origin_;
  std::string path_;
};

struct AssessOptions {
  int max_attempts = 2;  // first try plus one retry
  std::size_t concurrency = 1;
};

ScorerReport assess_corpus(const stl::LawCorpus& corpus, const Scorer& scorer,
                           const AssessOptions& opts = {});

// Expert review: entries replace scorer output for their law ids.
ScorerReport apply_overrides(ScorerReport report, const ScoreTable& overrides);

struct Consistency {
  double spearman = 0.0;
  double mae = 0.0;
};

// Spearman uses average ranks for ties; NaN when either side has no rank
// variation.
Consistency consistency(const ScorerReport& a, const ScorerReport& b);

double spearman(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> average_ranks(const std::vector<double>& v);

void store_report(const ScorerReport& report, const std::filesystem::path& path);
ScorerReport load_report(const std::filesystem::path& path);

}  // namespace lawforge::weighting
