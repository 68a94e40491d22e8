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

#include <atomic>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lawforge/weighting.hpp"
#include "support/metric_oracles.hpp"

namespace lawforge::weighting {
namespace {

stl::LawCorpus corpus_of(const std::vector<std::string>& ids) {
  std::vector<stl::LawSpec> laws;
  for (const auto& id : ids) {
    stl::LawSpec l;
    l.id = id;
    l.article = "Art. 1";
    l.description = "keep below " + id;
    l.formula = stl::parse_formula("G (real_speed < 10)");
    laws.push_back(std::move(l));
  }
  return stl::LawCorpus(std::move(laws));
}

ScorerReport report_of(const std::vector<double>& weights) {
  ScorerReport r;
  r.scorer = "test";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    // S = 4 makes w = O exactly.
    r.assessments.push_back({"law" + std::to_string(i), 4.0, weights[i], "", "test", weights[i]});
  }
  return r;
}

TEST(ComputeWeightTest, Examples) {
  EXPECT_EQ(compute_weight(4.0, 4.0), 4.0);
  EXPECT_EQ(compute_weight(0.0, 3.0), 0.0);
  EXPECT_EQ(compute_weight(3.0, 2.0), 1.5);
  EXPECT_THROW(compute_weight(4.1, 1.0), InputError);
  EXPECT_THROW(compute_weight(1.0, -0.1), InputError);
}

TEST(ComputeWeightTest, MonotoneOnGrid) {
  for (int s = 0; s <= 40; ++s) {
    for (int o = 0; o < 40; ++o) {
      EXPECT_LE(compute_weight(s / 10.0, o / 10.0), compute_weight(s / 10.0, (o + 1) / 10.0));
      EXPECT_LE(compute_weight(o / 10.0, s / 10.0), compute_weight((o + 1) / 10.0, s / 10.0));
    }
  }
}

TEST(RuleTableTest, SingleLaw) {
  auto table = parse_score_table("[law38_3]\nseverity = 4\noccurrence = 3\n");
  auto report = assess_corpus(corpus_of({"law38_3"}), RuleTableScorer(table));
  ASSERT_EQ(report.assessments.size(), 1u);
  EXPECT_EQ(report.assessments[0].weight, 3.0);
  EXPECT_TRUE(report.complete());
  EXPECT_TRUE(report.flags.range);
}

TEST(RuleTableTest, UncoveredLaw) {
  auto table = parse_score_table("[a]\nseverity = 1\noccurrence = 1\n");
  EXPECT_THROW(assess_corpus(corpus_of({"a", "b"}), RuleTableScorer(table)), UncoveredLawError);
}

TEST(RuleTableTest, Deterministic) {
  auto table = parse_score_table(
      "scorer = \"rules\"\n# comment\n[a]\nseverity = 2.5 # trailing\noccurrence = 1.5\n"
      "justification = \"often \\\"ignored\\\"\"\n\n[b]\nseverity = 0\noccurrence = 4\n");
  EXPECT_EQ(table.name, "rules");
  EXPECT_EQ(table.entries.at("a").justification, "often \"ignored\"");
  auto corpus = corpus_of({"a", "b"});
  auto r1 = assess_corpus(corpus, RuleTableScorer(table));
  auto r2 = assess_corpus(corpus, RuleTableScorer(table), {.max_attempts = 2, .concurrency = 4});
  ASSERT_EQ(r1.assessments.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(r1.assessments[i].law_id, r2.assessments[i].law_id);
    EXPECT_EQ(r1.assessments[i].weight, r2.assessments[i].weight);
  }
  EXPECT_EQ(r1.assessments[0].weight, 2.5 * 1.5 / 4.0);
}

TEST(RuleTableTest, ParseErrors) {
  EXPECT_THROW(parse_score_table("[a]\nseverity = 1\n"), SchemaError);
  EXPECT_THROW(parse_score_table("[a]\nseverity = x\noccurrence = 1\n"), SchemaError);
  EXPECT_THROW(parse_score_table("[a]\nseverity = 1\nseverity = 2\noccurrence = 1\n"), SchemaError);
  EXPECT_THROW(parse_score_table("[a\n"), SchemaError);
  EXPECT_THROW(parse_score_table("severity = 1\n"), SchemaError);
  EXPECT_THROW(parse_score_table("[a]\ncolor = 1\n"), SchemaError);
  EXPECT_THROW(parse_score_table("[a]\nseverity = 1\noccurrence = 1\n[a]\n"), SchemaError);
}

TEST(RuleTableTest, OutOfRangeEntryIsRejected) {
  auto table = parse_score_table("[a]\nseverity = 5\noccurrence = 1\n[b]\nseverity = 1\noccurrence = 1\n");
  auto report = assess_corpus(corpus_of({"a", "b"}), RuleTableScorer(table));
  EXPECT_FALSE(report.flags.range);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].law_id, "a");
  EXPECT_EQ(report.failures[0].attempts, 2);
  EXPECT_EQ(report.assessments.size(), 1u);
}

TEST(OverrideTest, TakesPrecedence) {
  auto table = parse_score_table("[a]\nseverity = 1\noccurrence = 1\n[b]\nseverity = 9\noccurrence = 1\n");
  auto report = assess_corpus(corpus_of({"a", "b"}), RuleTableScorer(table));
  auto fixed = apply_overrides(report, parse_score_table("[a]\nseverity = 4\noccurrence = 2\n"
                                                         "[b]\nseverity = 2\noccurrence = 2\n"));
  EXPECT_TRUE(fixed.complete());
  EXPECT_EQ(fixed.find("a")->weight, 2.0);
  EXPECT_EQ(fixed.find("a")->scorer, "override");
  EXPECT_EQ(fixed.find("b")->weight, 1.0);
  EXPECT_THROW(apply_overrides(report, parse_score_table("[zz]\nseverity = 1\noccurrence = 1\n")),
               InputError);
}

// In-process endpoint standing in for a language-model scorer.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = nlohmann::json::parse(req.body);
      const std::string id = body.at("law_id");
      last_auth_ = req.get_header_value("Authorization");
      int call = ++calls_[id];
      if (id == "flaky" && call == 1) {
        res.status = 503;
        return;
      }
      if (id == "garbled") {
        res.set_content("{\"severity\": \"high\"}", "application/json");
        return;
      }
      double s = id == "overrated" ? 5.1 : 3.0;
      nlohmann::json out = {{"severity", s},
                            {"occurrence", 2.0},
                            {"justification", "because " + id},
                            {"usage", {{"prompt_tokens", 100}, {"completion_tokens", 20}}}};
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/score"; }
  int calls(const std::string& id) { return calls_[id]; }
  std::string last_auth() const { return last_auth_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::map<std::string, std::atomic<int>> calls_;
  std::string last_auth_;
};

TEST(RemoteScorerTest, ValidResponses) {
  FakeEndpoint ep;
  RemoteScorer scorer({ep.url(), "secret", "stub-model", 5.0});
  auto report = assess_corpus(corpus_of({"a", "b"}), scorer);
  ASSERT_TRUE(report.complete());
  EXPECT_EQ(report.assessments[0].weight, 1.5);
  EXPECT_EQ(report.assessments[1].justification, "because b");
  ASSERT_TRUE(report.usage.has_value());
  EXPECT_EQ(report.usage->prompt_tokens, 200);
  EXPECT_EQ(ep.last_auth(), "Bearer secret");
  EXPECT_EQ(report.scorer, "remote:stub-model");
}

TEST(RemoteScorerTest, OutOfRangeScoreRejected) {
  FakeEndpoint ep;
  RemoteScorer scorer({ep.url(), "", "", 5.0});
  auto report = assess_corpus(corpus_of({"overrated", "fine"}), scorer);
  EXPECT_FALSE(report.flags.range);
  EXPECT_TRUE(report.flags.syntactic);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].law_id, "overrated");
  EXPECT_EQ(ep.calls("overrated"), 2);
  EXPECT_EQ(report.find("overrated"), nullptr);
}

TEST(RemoteScorerTest, MalformedAndRetry) {
  FakeEndpoint ep;
  RemoteScorer scorer({ep.url(), "", "", 5.0});
  auto report = assess_corpus(corpus_of({"garbled", "flaky"}), scorer, {.max_attempts = 2, .concurrency = 2});
  EXPECT_FALSE(report.flags.syntactic);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_EQ(report.failures[0].law_id, "garbled");
  ASSERT_NE(report.find("flaky"), nullptr);
  EXPECT_EQ(ep.calls("flaky"), 2);
}

TEST(RemoteScorerTest, TransportFailure) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteScorer scorer({"http://127.0.0.1:" + std::to_string(port) + "/score", "", "", 1.0});
  auto report = assess_corpus(corpus_of({"a"}), scorer);
  ASSERT_EQ(report.failures.size(), 1u);
  EXPECT_NE(report.failures[0].reason.find("transport"), std::string::npos);
}

TEST(RemoteScorerTest, ConfigValidation) {
  EXPECT_THROW(RemoteScorer({"ftp://x", "", "", 1.0}), ConfigError);
  EXPECT_THROW(RemoteScorer({"https://x/score", "", "", 1.0}), ConfigError);
  setenv("LAWFORGE_SCORER_KEY", "from-env", 1);
  auto cfg = apply_env_overrides({"http://h/score", "file-key", "", 1.0});
  unsetenv("LAWFORGE_SCORER_KEY");
  EXPECT_EQ(cfg.api_key, "from-env");
}

TEST(ConsistencyTest, SelfAndReversed) {
  auto a = report_of({0.5, 1.0, 2.0, 3.0});
  auto c = consistency(a, a);
  EXPECT_EQ(c.spearman, 1.0);
  EXPECT_EQ(c.mae, 0.0);
  auto b = report_of({3.0, 2.0, 1.0, 0.5});
  EXPECT_DOUBLE_EQ(consistency(a, b).spearman, -1.0);
}

TEST(ConsistencyTest, FiveLawHandListed) {
  auto a = report_of({1.0, 2.0, 2.0, 3.5, 0.25});
  auto b = report_of({1.5, 1.5, 3.0, 4.0, 0.0});
  auto c = consistency(a, b);
  std::vector<double> x{1.0, 2.0, 2.0, 3.5, 0.25}, y{1.5, 1.5, 3.0, 4.0, 0.0};
  EXPECT_NEAR(c.spearman, testing::brute_force_spearman(x, y), 1e-12);
  EXPECT_NEAR(c.mae, testing::brute_force_mae(x, y), 1e-12);
  EXPECT_NEAR(c.mae, (0.5 + 0.5 + 1.0 + 0.5 + 0.25) / 5.0, 1e-15);
}

TEST(ConsistencyTest, SymmetricAndValidated) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> grid(0, 16);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back(grid(rng) / 4.0);
      y.push_back(grid(rng) / 4.0);
    }
    auto ab = consistency(report_of(x), report_of(y));
    auto ba = consistency(report_of(y), report_of(x));
    if (std::isnan(ab.spearman)) continue;
    EXPECT_EQ(ab.spearman, ba.spearman);
    EXPECT_EQ(ab.mae, ba.mae);
    EXPECT_NEAR(ab.spearman, testing::brute_force_spearman(x, y), 1e-12);
  }
  EXPECT_THROW(consistency(report_of({1.0, 2.0}), report_of({1.0, 2.0, 3.0})), InputError);
  EXPECT_THROW(consistency(report_of({1.0}), report_of({1.0})), InputError);
}

TEST(ReportFileTest, RoundTrip) {
  auto r = report_of({0.5, 1.25, 4.0});
  r.failures.push_back({"law9", "transport failure: timeout", 2});
  r.usage = TokenUsage{10, 5};
  auto path = std::filesystem::temp_directory_path() / "lawforge_report_test.json";
  store_report(r, path);
  auto back = load_report(path);
  ASSERT_EQ(back.assessments.size(), 3u);
  EXPECT_EQ(back.assessments[1].weight, 1.25);
  EXPECT_EQ(back.failures.size(), 1u);
  EXPECT_EQ(back.usage->completion_tokens, 5);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace lawforge::weighting
