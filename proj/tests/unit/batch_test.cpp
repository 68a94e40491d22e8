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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "lawforge/sim.hpp"
#include "support/kinematics_oracle.hpp"

namespace lawforge::sim {
namespace {

const RoadStructure& s3() {
  static const RoadStructure r = load_road(LAWFORGE_DATA_DIR "/roads", "S3");
  return r;
}

reward::WeightedCorpus shipped_laws() {
  auto corpus = stl::load_corpus(LAWFORGE_DATA_DIR "/laws/corpus.json");
  std::map<std::string, double> w;
  for (const auto& l : corpus.laws()) w[l.id] = 1.0;
  return reward::WeightedCorpus(std::move(corpus), std::move(w));
}

std::vector<codec::NamedScenario> adversarial() {
  return codec::load_scenarios(LAWFORGE_DATA_DIR "/scenarios/adversarial/s3_adversarial.json");
}

codec::NamedScenario quiet(const std::string& id) {
  codec::NamedScenario ns{id, {}};
  ns.scenario.road = "S3";
  ns.scenario.lights = {90.0, 3.0, 20.0, 3.0, 0.0};
  ns.scenario.ego = {"lane1", 0.0, 8.0, "lane4"};
  return ns;
}

codec::NamedScenario foggy_and_fast(const std::string& id) {
  auto ns = quiet(id);
  ns.scenario.weather["fog"] = 0.9;
  ns.scenario.ego.speed = 15.0;
  return ns;
}

TEST(BatchTest, ShippedLawsOnlyNeedSimulatorSignals) {
  const auto laws = shipped_laws();
  const auto available = trace_signals();
  for (const auto& sig : laws.corpus().required_signals()) {
    EXPECT_TRUE(available.count(sig)) << sig;
  }
}

TEST(BatchTest, CoverageRemovesViolatedLaws) {
  const auto laws = shipped_laws();
  BatchOptions opts;
  auto r = test_batch({foggy_and_fast("a")}, s3(), laws, {}, {}, opts);
  ASSERT_EQ(r.violations.size(), 2u);
  std::set<std::string> hit;
  for (const auto& v : r.violations) {
    EXPECT_EQ(v.scenario_id, "a");
    hit.insert(v.law_id);
  }
  EXPECT_EQ(hit, (std::set<std::string>{"law42", "law58"}));
  EXPECT_EQ(r.remaining_laws.size(), laws.corpus().size() - 2);
}

TEST(BatchTest, RepeatedViolationOnlyCountsInCountingMode) {
  const auto laws = shipped_laws();
  auto second = quiet("b");
  second.scenario.weather["fog"] = 0.9;
  const std::vector<codec::NamedScenario> batch = {foggy_and_fast("a"), second};

  auto coverage = test_batch(batch, s3(), laws, {}, {}, {});
  EXPECT_EQ(coverage.violations.size(), 2u);
  EXPECT_EQ(coverage.counts.at("law58"), 1);

  BatchOptions counting;
  counting.mode = TestMode::kCounting;
  auto all = test_batch(batch, s3(), laws, {}, {}, counting);
  EXPECT_EQ(all.violations.size(), 3u);
  EXPECT_EQ(all.counts.at("law58"), 2);
  EXPECT_EQ(all.remaining_laws.size(), laws.corpus().size());
}

TEST(BatchTest, CleanBatchHasNoViolations) {
  auto r = test_batch({quiet("a"), quiet("b")}, s3(), shipped_laws(), {}, {}, {});
  EXPECT_TRUE(r.violations.empty());
  EXPECT_TRUE(r.failures.empty());
  EXPECT_EQ(r.rewards.size(), 2u);
  for (const auto& rec : r.rewards) EXPECT_EQ(rec.overall, 0.0);
}

TEST(BatchTest, FailingScenarioDoesNotAbortBatch) {
  auto bad = quiet("bad");
  bad.scenario.ego.destination = "lane2";
  auto r = test_batch({bad, foggy_and_fast("good")}, s3(), shipped_laws(), {}, {}, {});
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].scenario_id, "bad");
  EXPECT_EQ(r.violations.size(), 2u);
}

TEST(BatchTest, WorkingSetNeverGrows) {
  std::mt19937_64 rng(3);
  std::vector<codec::NamedScenario> batch;
  for (int i = 0; i < 40; ++i) batch.push_back({"s" + std::to_string(i), codec::sample_scenario(rng, s3())});
  const auto laws = shipped_laws();
  std::size_t prev = laws.corpus().size();
  for (std::size_t n = 1; n <= batch.size(); ++n) {
    std::vector<codec::NamedScenario> prefix(batch.begin(), batch.begin() + static_cast<long>(n));
    const auto r = test_batch(prefix, s3(), laws, {}, {}, {});
    EXPECT_LE(r.remaining_laws.size(), prev);
    prev = r.remaining_laws.size();
  }
}

TEST(BatchTest, ParallelBatchMatchesSerial) {
  std::mt19937_64 rng(11);
  std::vector<codec::NamedScenario> batch;
  for (int i = 0; i < 30; ++i) batch.push_back({"s" + std::to_string(i), codec::sample_scenario(rng, s3())});
  BatchOptions serial;
  serial.mode = TestMode::kCounting;
  serial.keep_traces = true;
  BatchOptions parallel = serial;
  parallel.threads = 4;
  const auto laws = shipped_laws();
  const auto a = test_batch(batch, s3(), laws, {}, {}, serial);
  const auto b = test_batch(batch, s3(), laws, {}, {}, parallel);
  EXPECT_EQ(a.traces, b.traces);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) {
    EXPECT_EQ(a.violations[i].law_id, b.violations[i].law_id);
    EXPECT_EQ(a.violations[i].scenario_id, b.violations[i].scenario_id);
    EXPECT_EQ(a.violations[i].min_robustness, b.violations[i].min_robustness);
  }
}

TEST(BatchTest, UnknownLawIsConfigError) {
  BatchOptions opts;
  opts.laws = {"law999"};
  EXPECT_THROW(test_batch({quiet("a")}, s3(), shipped_laws(), {}, {}, opts), ConfigError);
}

TEST(AdversarialTest, MatchesClosedFormKinematics) {
  const auto batch = adversarial();
  BatchOptions opts;
  opts.mode = TestMode::kCounting;
  opts.keep_traces = true;
  const auto r = test_batch(batch, s3(), shipped_laws(), {}, {}, opts);
  ASSERT_TRUE(r.failures.empty());
  ASSERT_EQ(r.traces.size(), batch.size());
  std::set<std::string> laws_hit;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto pred = testing::predict_adversarial(batch[i], s3());
    const auto& tr = r.traces[i];
    EXPECT_EQ(tr.metadata().termination, pred.termination) << batch[i].id;
    if (pred.ticks > 0) EXPECT_EQ(tr.length(), pred.ticks) << batch[i].id;
    std::map<std::string, double> got;
    for (const auto& v : r.violations) {
      if (v.scenario_id == batch[i].id) got[v.law_id] = v.min_robustness;
    }
    std::map<std::string, double> want;
    for (const auto& v : pred.violations) want[v.law_id] = v.min_robustness;
    ASSERT_EQ(got.size(), want.size()) << batch[i].id;
    for (const auto& [law, value] : want) {
      ASSERT_TRUE(got.count(law)) << batch[i].id << " " << law;
      EXPECT_NEAR(got[law], value, 1e-9) << batch[i].id << " " << law;
      laws_hit.insert(law);
    }
  }
  EXPECT_GE(laws_hit.size(), 6u);
}

TEST(AdversarialTest, ReportRoundTripsThroughJson) {
  const auto r = test_batch(adversarial(), s3(), shipped_laws(), {}, {}, {});
  const auto path = std::filesystem::temp_directory_path() / "lawforge_violations.json";
  store_violation_report(r, TestMode::kCoverage, "S3", path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("\"schema_version\": 1"), std::string::npos);
  EXPECT_NE(text.find("adv_crossing_npc"), std::string::npos);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace lawforge::sim
