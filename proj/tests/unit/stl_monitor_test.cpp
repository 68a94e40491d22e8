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
#include <random>

#include <gtest/gtest.h>

#include "lawforge/stl.hpp"
#include "support/oracles.hpp"

namespace lawforge::stl {
namespace {

using trace::Signal;
using trace::Trace;

Trace constant_trace(const std::string& name, double value, std::size_t n = 20) {
  return Trace(0.1, {Signal::numeric(name, std::vector<double>(n, value))});
}

TEST(StlMonitorTest, AtomIsSignalMinusConstant) {
  auto tr = constant_trace("real_speed", 7.0);
  auto f = parse_formula("real_speed > 5.0");
  for (double t : {0.0, 0.55, 1.0, 2.0}) EXPECT_DOUBLE_EQ(robustness(f, tr, t), 2.0);
  EXPECT_DOUBLE_EQ(robustness(parse_formula("real_speed < 5.0"), tr, 0.0), -2.0);
}

TEST(StlMonitorTest, AlwaysTakesMinimum) {
  std::vector<double> speed(30, 4.0);
  speed[17] = -1.0;
  Trace tr(0.1, {Signal::numeric("speed", speed)});
  EXPECT_DOUBLE_EQ(robustness(parse_formula("G (speed > 0)"), tr, 0.0), -1.0);
  // After the dip the trace satisfies the formula again.
  EXPECT_DOUBLE_EQ(robustness(parse_formula("G (speed > 0)"), tr, 1.8), 4.0);
  EXPECT_DOUBLE_EQ(robustness(parse_formula("F (speed < 0)"), tr, 0.0), 1.0);
}

TEST(StlMonitorTest, CategoricalEqualityUsesKappa) {
  Trace tr(1.0, {Signal::categorical("light", {"red", "green"}, {0, 1})});
  auto f = parse_formula("light = red");
  EXPECT_DOUBLE_EQ(robustness(f, tr, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(robustness(f, tr, 1.0), -1.0);
  MonitorOptions opts;
  opts.kappa = 2.5;
  EXPECT_DOUBLE_EQ(robustness(parse_formula("light != red"), tr, 0.0, opts), -2.5);
  // Literals outside the alphabet never match.
  EXPECT_DOUBLE_EQ(robustness(parse_formula("light = blue"), tr, 0.0), -1.0);
}

TEST(StlMonitorTest, BoundedWindowsClipToTraceEnd) {
  std::vector<double> x{5, 4, 3, 2, 1};
  Trace tr(1.0, {Signal::numeric("x", x)});
  EXPECT_DOUBLE_EQ(robustness(parse_formula("G[0, 2] x > 0"), tr, 0.0), 3.0);
  EXPECT_DOUBLE_EQ(robustness(parse_formula("G[1, 10] x > 0"), tr, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(robustness(parse_formula("F[1, 2] x > 0"), tr, 2.0), 2.0);
}

TEST(StlMonitorTest, WindowPastTraceEndIsAnError) {
  Trace tr(1.0, {Signal::numeric("x", {1, 2, 3})});
  EXPECT_THROW(robustness(parse_formula("F[5, 6] x > 0"), tr, 0.0), EvaluationError);
  EXPECT_THROW(robustness(parse_formula("G[1, 2] x > 0"), tr, 2.5), EvaluationError);
  EXPECT_NO_THROW(robustness(parse_formula("G[1, 2] x > 0"), tr, 1.0));
}

TEST(StlMonitorTest, MissingSignalAndTypeErrors) {
  auto tr = constant_trace("x", 1.0);
  EXPECT_THROW(robustness(parse_formula("y > 1"), tr, 0.0), EvaluationError);
  EXPECT_THROW(robustness(parse_formula("x > y"), tr, 0.0), EvaluationError);
  EXPECT_THROW(robustness(parse_formula("x = red"), tr, 0.0), EvaluationError);
  Trace cat(1.0, {Signal::categorical("c", {"a"}, {0})});
  EXPECT_THROW(robustness(parse_formula("c > 1"), cat, 0.0), EvaluationError);
  EXPECT_THROW(robustness(parse_formula("x > 0"), tr, 5.0), EvaluationError);
}

TEST(StlMonitorTest, DistanceBudgetWindowUsesEgoSpeed) {
  // 10 m budget at 5 m/s spans 2 s = 4 samples of 0.5 s beyond t.
  std::vector<double> v(10, 5.0), len(10, 10.0), x{0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
  Trace tr(0.5, {Signal::numeric("real_speed", v), Signal::numeric("length", len),
                 Signal::numeric("x", x)});
  auto f = parse_formula("F[0, length] (x > 0.5)");
  EXPECT_DOUBLE_EQ(robustness(f, tr, 0.0), 0.5);
  // Budget too short: only samples 0..2 are visible from t = 0.
  std::vector<double> short_len(10, 5.0);
  Trace tr2(0.5, {Signal::numeric("real_speed", v), Signal::numeric("length", short_len),
                  Signal::numeric("x", x)});
  EXPECT_DOUBLE_EQ(robustness(f, tr2, 0.0), -0.5);
  // Standing still: the window extends to the trace end.
  Trace tr3(0.5, {Signal::numeric("real_speed", std::vector<double>(10, 0.0)),
                  Signal::numeric("length", short_len), Signal::numeric("x", x)});
  EXPECT_DOUBLE_EQ(robustness(f, tr3, 0.0), 0.5);
  EXPECT_EQ(required_signals(f), (std::set<std::string>{"length", "real_speed", "x"}));
}

// Hand-authored 10 s approach to a red light with a right turn: brake, wait
// at the stop line, a crossing vehicle, then pull away after the light turns.
Trace right_turn_trace() {
  const std::size_t n = 100;
  trace::TraceBuilder b(0.1);
  b.declare_numeric("real_speed");
  b.declare_numeric("speed");
  b.declare_numeric("length");
  b.declare_numeric("stopline_ahead");
  b.declare_numeric("junction_ahead");
  b.declare_categorical("traffic_light_ahead.color", {"red", "yellow", "green", "none"});
  b.declare_categorical("traffic_light_ahead.direction.color", {"red", "yellow", "green", "none"});
  b.declare_categorical("direction", {"left", "straight", "right"});
  b.declare_categorical("priority_npc_ahead", {"false", "true"});
  b.declare_categorical("priority_peds_ahead", {"false", "true"});
  double pos = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    double v = 0.0;
    if (t < 3.0) v = 8.0 * (1.0 - t / 3.0);
    else if (t >= 7.0) v = 1.0 * (t - 7.0);
    const double stop = std::max(0.0, 12.5 - pos);
    b.set("real_speed", v);
    b.set("speed", 0.5);
    b.set("length", 10.0);
    b.set("stopline_ahead", pos < 12.5 ? stop : 1000.0);
    b.set("junction_ahead", pos < 16.5 ? 16.5 - pos : 0.0);
    b.set("traffic_light_ahead.color", pos >= 12.5 ? "none" : (t < 8.5 ? "red" : "green"));
    b.set("traffic_light_ahead.direction.color", "none");
    b.set("direction", "right");
    b.set("priority_npc_ahead", (t >= 6.0 && t < 7.0) ? "true" : "false");
    b.set("priority_peds_ahead", "false");
    b.commit_tick();
    pos += v * 0.1;
  }
  return std::move(b).finish({"clause38", 0, ""});
}

TEST(StlMonitorTest, RightTurnOnRedMatchesBruteForce) {
  auto f = parse_formula(R"(
    G {
      (traffic_light_ahead.color = red or traffic_light_ahead.direction.color = red)
      and direction = right and not priority_npc_ahead and not priority_peds_ahead
      and (stopline_ahead(length) or junction_ahead(length))
    } implies F[0, length] (real_speed > speed))");
  auto tr = right_turn_trace();
  auto fast = robustness_signal(f, tr);
  auto slow = testing::brute_force_robustness(f, tr);
  ASSERT_EQ(fast.size(), slow.size());
  for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i], slow[i]) << "index " << i;
  EXPECT_EQ(robustness(f, tr, 0.0), slow[0]);
}

TEST(StlMonitorTest, NegationAntisymmetryAndConjunction) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    auto tr = testing::random_trace(rng, 60);
    auto a = testing::random_formula(rng, 3);
    auto b = testing::random_formula(rng, 3);
    auto ra = robustness_signal(a, tr);
    auto rb = robustness_signal(b, tr);
    auto rn = robustness_signal(Formula::negation(a), tr);
    auto rc = robustness_signal(Formula::conjunction({a, b}), tr);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      if (std::isnan(ra[k])) {
        EXPECT_TRUE(std::isnan(rn[k]));
        continue;
      }
      EXPECT_EQ(rn[k], -ra[k]);
      if (!std::isnan(rb[k])) EXPECT_EQ(rc[k], std::min(ra[k], rb[k]));
    }
  }
}

TEST(StlMonitorTest, ShrinkingWindowsIsMonotone) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    auto tr = testing::random_trace(rng, 80);
    auto body = testing::random_formula(rng, 2);
    const double a = 0.1 * std::round(u(rng) * 5.0);
    const double b = a + u(rng);
    const double b_short = a + (b - a) * 0.5;
    auto g_long = robustness_signal(Formula::always(body, Window{a, b}), tr);
    auto g_short = robustness_signal(Formula::always(body, Window{a, b_short}), tr);
    auto f_long = robustness_signal(Formula::eventually(body, Window{a, b}), tr);
    auto f_short = robustness_signal(Formula::eventually(body, Window{a, b_short}), tr);
    for (std::size_t k = 0; k < g_long.size(); ++k) {
      if (std::isnan(g_long[k]) || std::isnan(g_short[k])) continue;
      EXPECT_GE(g_short[k], g_long[k]);
      EXPECT_LE(f_short[k], f_long[k]);
    }
  }
}

TEST(StlMonitorTest, RandomizedOracleAgreement) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> len(1, 120);
  for (int i = 0; i < 300; ++i) {
    auto tr = testing::random_trace(rng, len(rng));
    auto f = testing::random_formula(rng, 4);
    auto fast = robustness_signal(f, tr);
    auto slow = testing::brute_force_robustness(f, tr);
    auto sat = testing::boolean_satisfaction(f, tr);
    for (std::size_t k = 0; k < fast.size(); ++k) {
      ASSERT_EQ(std::isnan(fast[k]), std::isnan(slow[k])) << to_string(f) << " @" << k;
      ASSERT_EQ(std::isnan(fast[k]), !sat[k].has_value());
      if (std::isnan(fast[k])) continue;
      ASSERT_EQ(fast[k], slow[k]) << to_string(f) << " @" << k;
      if (fast[k] > 0) ASSERT_TRUE(*sat[k]) << to_string(f);
      if (fast[k] < 0) ASSERT_FALSE(*sat[k]) << to_string(f);
    }
  }
}

}  // namespace
}  // namespace lawforge::stl
