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

#include "lawforge/analytics.hpp"
#include "lawforge/scenario.hpp"
#include "lawforge/sim.hpp"
#include "support/metric_oracles.hpp"

namespace lawforge::analytics {
namespace {

std::vector<testing::XY> as_xy(const Path& p) {
  std::vector<testing::XY> out;
  for (const auto& pt : p) out.emplace_back(pt.x, pt.y);
  return out;
}

Path random_path(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  Path p;
  for (std::size_t i = 0; i < n; ++i) p.push_back({u(rng), u(rng)});
  return p;
}

const sim::RoadStructure& s3() {
  static const auto road = sim::load_road(LAWFORGE_DATA_DIR "/roads", "S3");
  return road;
}

TEST(DtwTest, TrivialCases) {
  const Path x = {{0, 0}, {1, 2}, {3, 1}};
  EXPECT_EQ(dtw(x, x), 0.0);
  EXPECT_EQ(dtw(Path{{0, 0}}, Path{{3, 4}}, 1.0), 5.0);
  EXPECT_THROW(dtw(Path{}, x), InputError);
  EXPECT_THROW(dtw(x, x, 0.5), ConfigError);
}

TEST(DtwTest, HandSetFourByThreeMatchesEnumeration) {
  const Path x = {{0, 0}, {1, 0}, {2, 1}, {4, 1}};
  const Path y = {{0, 1}, {2, 2}, {3, 0}};
  for (double q : {1.0, 2.0, 3.0}) {
    EXPECT_NEAR(dtw(x, y, q), testing::exhaustive_dtw(as_xy(x), as_xy(y), q), 1e-12);
  }
  EXPECT_EQ(testing::exhaustive_dtw_paths(), 25u);
}

TEST(DtwTest, MatchesEnumerationUpToFiveByFive) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 5; ++n) {
    for (std::size_t m = 1; m <= 5; ++m) {
      for (int k = 0; k < 20; ++k) {
        const Path x = random_path(rng, n), y = random_path(rng, m);
        const double q = 1.0 + k % 3;
        EXPECT_NEAR(dtw(x, y, q), testing::exhaustive_dtw(as_xy(x), as_xy(y), q), 1e-9);
      }
    }
  }
}

TEST(DtwTest, SymmetricAndBoundedByDiagonal) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 50; ++k) {
    const Path x = random_path(rng, 8), y = random_path(rng, 8), z = random_path(rng, 5);
    EXPECT_DOUBLE_EQ(dtw(x, z, 2.0), dtw(z, x, 2.0));
    double diag = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) diag += std::hypot(x[i].x - y[i].x, x[i].y - y[i].y);
    EXPECT_LE(dtw(x, y), diag + 1e-12);
    EXPECT_GE(dtw(x, y), 0.0);
  }
}

TEST(DistinctTest, Examples) {
  const std::vector<Sentence> distinct = {{"a", "b", "c", "d"}};
  EXPECT_EQ(distinct_n(distinct, 1), 1.0);
  const std::vector<Sentence> repeat = {{"a", "a", "a", "a"}};
  EXPECT_EQ(distinct_n(repeat, 1), 0.25);
  // Bigrams: ab bc | ab | bc ca | - | ab bc -> 3 unique of 7.
  const std::vector<Sentence> corpus = {{"a", "b", "c"}, {"a", "b"}, {"b", "c", "a"}, {"c"}, {"a", "b", "c"}};
  EXPECT_DOUBLE_EQ(distinct_n(corpus, 2), 3.0 / 7.0);
  EXPECT_THROW(distinct_n(corpus, 4), InputError);
}

TEST(DistinctTest, DuplicateNeverIncreases) {
  std::vector<Sentence> corpus = {{"a", "b", "c"}, {"c", "d"}, {"e", "a", "b", "b"}};
  for (std::size_t n = 1; n <= 3; ++n) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto more = corpus;
      more.push_back(corpus[i]);
      EXPECT_LE(distinct_n(more, n), distinct_n(corpus, n));
    }
  }
}

TEST(BleuTest, IdenticalSetScoresOne) {
  const std::vector<Sentence> same(4, Sentence{"x", "y", "z", "x", "w"});
  EXPECT_DOUBLE_EQ(self_bleu(same), 1.0);
  const std::vector<Sentence> shorter(3, Sentence{"x", "y"});
  EXPECT_DOUBLE_EQ(self_bleu(shorter), 1.0);
}

TEST(BleuTest, DisjointPairScoresNearZero) {
  const std::vector<Sentence> pair = {{"a", "b", "c", "d", "e"}, {"f", "g", "h", "i", "j"}};
  EXPECT_LT(self_bleu(pair), 0.05);
  EXPECT_THROW(self_bleu(std::vector<Sentence>{{"a"}}), InputError);
}

TEST(BleuTest, ThreeSentencesByHand) {
  // A = a b c d, B = a b c e, C = x y.
  // A against {B, C}: p1 = 3/4, p2 = (2+1)/(3+1), p3 = (1+1)/(2+1),
  // p4 = (0+1)/(1+1), closest reference length 4 so no brevity penalty.
  // B mirrors A. C shares no unigram with A or B and scores 0.
  const std::vector<Sentence> s = {{"a", "b", "c", "d"}, {"a", "b", "c", "e"}, {"x", "y"}};
  const double a = std::pow(0.75 * 0.75 * (2.0 / 3.0) * 0.5, 0.25);
  EXPECT_NEAR(self_bleu(s), 2.0 * a / 3.0, 1e-15);
}

TEST(BleuTest, BrevityPenaltyAndOrderCap) {
  const Sentence ref = {"a", "b", "c", "d"};
  const Sentence* refs[] = {&ref};
  // Every order matches (p3 = p4 = (0+1)/(0+1)); c = 2, r = 4.
  EXPECT_NEAR(sentence_bleu({"a", "b"}, refs), std::exp(-1.0), 1e-15);
  BleuOptions two;
  two.max_order = 2;
  // p1 = 3/3, p2 = (1+1)/(2+1) since only "a b" matches; c = 3, r = 4.
  EXPECT_NEAR(sentence_bleu({"a", "b", "d"}, refs, two),
              std::exp(1.0 - 4.0 / 3.0) * std::sqrt(1.0 * (2.0 / 3.0)), 1e-15);
}

TEST(EntropyTest, Examples) {
  EXPECT_EQ(entropy(std::vector<Sentence>{{"a", "b"}, {"b", "a"}}), 1.0);
  EXPECT_EQ(entropy(std::vector<Sentence>{{"a", "a", "a"}}), 0.0);
  const std::vector<Sentence> uniform = {{"a", "b", "c", "d", "e"}};
  EXPECT_NEAR(entropy(uniform), std::log2(5.0), 1e-12);
  const std::vector<Sentence> skewed = {{"a", "b", "c", "d", "e", "a"}};
  EXPECT_LT(entropy(skewed), std::log2(5.0));
  EXPECT_THROW(entropy(std::vector<Sentence>{}), InputError);
}

TEST(CoverageTest, EightOfTen) {
  const std::vector<std::string> core = {"c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9"};
  const std::vector<Sentence> used = {{"c0", "c1", "c2", "zz"}, {"c3", "c4", "c5", "c6", "c7", "c7"}};
  EXPECT_DOUBLE_EQ(coverage(used, core), 0.8);
}

TEST(CoverageTest, TokenStems) {
  EXPECT_EQ(token_stem("npc1+speed+3.5"), "npc1+speed");
  EXPECT_EQ(token_stem("time+8+20"), "time");
  EXPECT_EQ(token_stem("ego+dest+lane4"), "ego+dest+lane4");
}

TEST(PercentileTest, NearestRank) {
  const std::vector<double> d = {15, 20, 35, 40, 50};
  EXPECT_EQ(percentile(d, 0), 15);
  EXPECT_EQ(percentile(d, 30), 20);
  EXPECT_EQ(percentile(d, 40), 20);
  EXPECT_EQ(percentile(d, 50), 35);
  EXPECT_EQ(percentile(d, 100), 50);
  const auto q = quartiles({3, 1, 2, 5, 4, 6, 7, 8});
  EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));
  EXPECT_EQ(q[2], 4);
}

TEST(ValidityTest, EncodedScenariosAndOneMangled) {
  std::mt19937_64 rng(3);
  std::vector<codec::ActionSequence> seqs;
  for (int i = 0; i < 4; ++i) seqs.push_back(codec::encode(codec::sample_scenario(rng, s3()), s3()));
  auto v = validity(seqs, s3());
  EXPECT_EQ(v.completeness, 1.0);
  EXPECT_EQ(v.satisfaction, 1.0);
  seqs[2].tokens.erase(seqs[2].tokens.begin());
  v = validity(seqs, s3());
  EXPECT_EQ(v.completeness, 0.75);
  EXPECT_EQ(v.complete, 3u);
}

TEST(ReportTest, TrajectoriesAndRoundTrip) {
  std::mt19937_64 rng(5);
  codec::SamplerOptions opts;
  opts.max_npcs = 2;
  std::vector<codec::ActionSequence> seqs;
  std::vector<trace::Trace> traces;
  for (int i = 0; i < 6; ++i) {
    auto s = codec::sample_scenario(rng, s3(), opts);
    seqs.push_back(codec::encode(s, s3()));
    traces.push_back(sim::run_scenario(s, s3(), {}, {}, "r" + std::to_string(i)));
  }
  const auto set = extract_trajectories(traces, "S3");
  for (const auto& [id, paths] : set.npcs) {
    for (const auto& p : paths) EXPECT_FALSE(p.empty());
  }
  const auto serial = pairwise_dtw(set, 1.0, 1);
  EXPECT_EQ(pairwise_dtw(set, 1.0, 3), serial);
  const auto vocab = codec::Vocabulary::build(s3());
  ReportOptions ro;
  ro.threads = 2;
  const auto report = build_report(seqs, s3(), vocab, traces, ro);
  EXPECT_EQ(report.samples, 6u);
  EXPECT_EQ(report.completeness, 1.0);
  for (double d : report.distinct) {
    EXPECT_GT(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
  EXPECT_GT(report.coverage, 0.0);
  EXPECT_LE(report.coverage, 1.0);
  for (const auto& [id, q] : report.dtw) EXPECT_TRUE(std::is_sorted(q.begin(), q.end()));

  const auto dir = std::filesystem::temp_directory_path() / "lawforge_report_test";
  store_report(report, dir / "metrics.json");
  const auto back = load_report(dir / "metrics.json");
  EXPECT_EQ(back.dtw, report.dtw);
  EXPECT_EQ(back.distinct, report.distinct);
  EXPECT_EQ(back.self_bleu, report.self_bleu);
  write_box_plot(report.dtw, "DTW per NPC", dir / "dtw.svg");
  write_bar_chart({{"law42", 3}, {"law46", 1}}, "violations", dir / "bars.svg");
  std::ifstream svg(dir / "bars.svg");
  std::string first;
  std::getline(svg, first);
  EXPECT_EQ(first.rfind("<svg", 0), 0u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lawforge::analytics
