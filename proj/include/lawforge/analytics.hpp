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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lawforge/codec.hpp"
#include "lawforge/error.hpp"
#include "lawforge/road.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::analytics {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

using Path = std::vector<Point>;

// (min over alignment paths of sum d(x_i, y_j)^q)^(1/q). Paths start at
// (0, 0), end at (n-1, m-1) and step by (1,0), (0,1) or (1,1).
double dtw(std::span<const Point> x, std::span<const Point> y, double q = 1.0);

// Token sequences for the n-gram metrics; any string alphabet works.
using Sentence = std::vector<std::string>;

// Unique n-grams over total n-grams across the whole set.
double distinct_n(std::span<const Sentence> sentences, std::size_t n);

struct BleuOptions {
  std::size_t max_order = 4;
};

// Mean over sentences of BLEU against all other sentences as references.
// Orders >= 2 use add-one smoothing on both matched and total counts;
// unigram precision is unsmoothed.
double self_bleu(std::span<const Sentence> sentences, const BleuOptions& opts = {});
// One hypothesis against a reference set, same formula.
double sentence_bleu(const Sentence& hypothesis, std::span<const Sentence* const> references,
                     const BleuOptions& opts = {});

// Shannon entropy in bits of the unigram distribution.
double entropy(std::span<const Sentence> sentences);
// Fraction of `core` used by at least one sentence.
double coverage(std::span<const Sentence> sentences, std::span<const std::string> core);

// Token with its trailing numeric fields removed: "npc1+speed+3.5" becomes
// "npc1+speed" and "time+8+20" becomes "time".
std::string token_stem(std::string_view token);
// Distinct stems of the non-special tokens of `vocab`.
std::vector<std::string> core_vocabulary(const codec::Vocabulary& vocab);

struct Validity {
  double completeness = 0.0;
  double satisfaction = 0.0;
  std::size_t total = 0;
  std::size_t complete = 0;
  std::size_t satisfied = 0;
};

// Complete: decodes with every required field. Satisfied: complete, no value
// needed clamping, and the scenario meets its invariants and constraints.
Validity validity(std::span<const codec::ActionSequence> sequences, const sim::RoadStructure& road);

// Nearest-rank percentile of unsorted data, p in [0, 100].
double percentile(std::vector<double> data, double p);
std::array<double, 5> quartiles(std::vector<double> data);

// NPC position sequences keyed by NPC id ("npc1", ...), one path per trace
// that carries the NPC, sampled every `stride` seconds.
struct TrajectorySet {
  std::string road;
  std::map<std::string, std::vector<Path>> npcs;
};

TrajectorySet extract_trajectories(std::span<const trace::Trace> traces, const std::string& road,
                                   double stride = 1.0);

// {"schema_version", "road", "npcs": {id: [[[x, y], ...], ...]}}.
void store_trajectories(const TrajectorySet& set, const std::filesystem::path& path);
TrajectorySet load_trajectories(const std::filesystem::path& path);

// All pairwise DTW values per NPC, in (i < j) lexicographic order.
std::map<std::string, std::vector<double>> pairwise_dtw(const TrajectorySet& set, double q = 1.0,
                                                        std::size_t threads = 1);

struct MetricReport {
  std::string road;
  std::size_t samples = 0;
  std::map<std::string, std::array<double, 5>> dtw;
  std::array<double, 3> distinct{};
  double self_bleu = 0.0;
  double entropy = 0.0;
  double coverage = 0.0;
  double completeness = 0.0;
  double satisfaction = 0.0;
};

struct ReportOptions {
  BleuOptions bleu;
  double dtw_order = 1.0;
  double stride = 1.0;
  std::size_t threads = 1;
};

// Token metrics over `sequences`; DTW over `trajectories` when given.
MetricReport build_report(std::span<const codec::ActionSequence> sequences,
                          const sim::RoadStructure& road, const codec::Vocabulary& vocab,
                          const TrajectorySet* trajectories, const ReportOptions& opts = {});
MetricReport build_report(std::span<const codec::ActionSequence> sequences,
                          const sim::RoadStructure& road, const codec::Vocabulary& vocab,
                          std::span<const trace::Trace> traces, const ReportOptions& opts = {});

void store_report(const MetricReport& report, const std::filesystem::path& path);
MetricReport load_report(const std::filesystem::path& path);

// Static SVG charts.
void write_box_plot(const std::map<std::string, std::array<double, 5>>& boxes,
                    const std::string& title, const std::filesystem::path& path);
void write_bar_chart(const std::map<std::string, double>& bars, const std::string& title,
                     const std::filesystem::path& path);

}  // namespace lawforge::analytics
