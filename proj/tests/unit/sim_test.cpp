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
#include <random>

#include "lawforge/sim.hpp"

namespace lawforge::sim {
namespace {

using codec::NpcState;
using codec::Scenario;

const RoadStructure& road(const std::string& tag) {
  static std::map<std::string, RoadStructure> cache;
  auto it = cache.find(tag);
  if (it == cache.end()) it = cache.emplace(tag, load_road(LAWFORGE_DATA_DIR "/roads", tag)).first;
  return it->second;
}

// Westbound-to-eastbound straight run on S3 under a long main green.
Scenario straight_run(double offset, double speed) {
  Scenario s;
  s.road = "S3";
  s.lights = {90.0, 3.0, 20.0, 3.0, 0.0};
  s.ego = {"lane1", offset, speed, "lane4"};
  return s;
}

double num(const trace::Trace& t, const std::string& name, std::size_t k) {
  return t.signal(name).values()[k];
}

std::string cat(const trace::Trace& t, const std::string& name, std::size_t k) {
  return std::get<std::string>(t.signal(name).at(k));
}

TEST(SimTest, GreenRunTakesPathLengthOverCruiseSpeed) {
  const auto s = straight_run(0.0, 8.0);
  const auto tr = run_scenario(s, road("S3"), {}, {});
  const double expected = road("S3").route("lane1", "lane4")->length() / 8.0;
  EXPECT_EQ(tr.metadata().termination, "destination");
  EXPECT_LE(std::abs(tr.duration() - expected), tr.step() + 1e-9);
  for (std::size_t k = 0; k < tr.length(); ++k) EXPECT_DOUBLE_EQ(num(tr, "real_speed", k), 8.0);
}

TEST(SimTest, StopsBeforeTheLineOnRed) {
  auto s = straight_run(10.0, 8.0);
  s.lights = {20.0, 3.0, 20.0, 3.0, 23.0};  // main group red for the first 23 s
  SimConfig cfg;
  cfg.blockage_timeout = 30.0;
  const auto tr = run_scenario(s, road("S3"), {}, cfg);
  bool stopped = false;
  for (std::size_t k = 0; k < tr.length(); ++k) {
    const bool red = cat(tr, "traffic_light_ahead.color", k) == "red";
    if (red) EXPECT_GT(num(tr, "stopline_ahead", k), 0.0) << "tick " << k;
    if (red && num(tr, "real_speed", k) == 0.0) stopped = true;
  }
  EXPECT_TRUE(stopped);
  EXPECT_EQ(tr.metadata().termination, "destination");
}

TEST(SimTest, RightOnRedWaitsAndTimesOut) {
  Scenario s;
  s.road = "S3";
  s.lights = {20.0, 3.0, 60.0, 3.0, 23.0};  // main red for 63 s
  s.ego = {"lane1", 30.0, 6.0, "lane6"};    // west approach turning right onto south exit
  ASSERT_EQ(road("S3").route("lane1", "lane6")->turn, Turn::kRight);
  SimConfig cfg;
  cfg.blockage_timeout = 5.0;
  const auto tr = run_scenario(s, road("S3"), {}, cfg);
  EXPECT_EQ(tr.metadata().termination, "timeout");
  EXPECT_EQ(num(tr, "real_speed", tr.length() - 1), 0.0);
}

TEST(SimTest, CrossingNpcCollidesWhenYieldingIsDisabled) {
  // Ego runs east along y = -1.75 from x = -46.7 at 8 m/s; the NPC runs north
  // along x = 1.75 from y = -50.5 at 8 m/s. Axis-aligned boxes overlap once
  // both centres are within (4.5 + 1.8) / 2 of the crossing point (1.75, -1.75).
  auto s = straight_run(20.3, 8.0);
  NpcState n;
  n.id = "npc1";
  n.lane = "lane5";
  n.offset = 16.5;
  n.speed = 8.0;
  n.destination = "lane8";
  s.npcs.push_back(n);
  EgoPolicy p;
  p.yield_to_priority = false;

  const double reach = (4.5 + 1.8) / 2.0;
  const double ego_x0 = -67.0 + 20.3;
  const double npc_y0 = -67.0 + 16.5;
  const double ego_enter = (1.75 - reach - ego_x0) / 8.0;
  const double npc_enter = (-1.75 - reach - npc_y0) / 8.0;
  const double first_contact = std::max(ego_enter, npc_enter);
  const auto contact_tick = static_cast<std::size_t>(std::floor(first_contact / 0.1)) + 1;

  const auto tr = run_scenario(s, road("S3"), p, {});
  EXPECT_EQ(tr.metadata().termination, "collision");
  EXPECT_EQ(tr.length(), contact_tick + 1);
  EXPECT_EQ(cat(tr, "collision", tr.length() - 1), "true");
  EXPECT_EQ(cat(tr, "collision", tr.length() - 2), "false");
}

TEST(SimTest, FollowsSlowLeaderWithoutContact) {
  auto s = straight_run(0.0, 8.0);
  NpcState n;
  n.id = "npc1";
  n.lane = "lane1";
  n.offset = 25.0;
  n.speed = 4.0;
  n.destination = "lane4";
  s.npcs.push_back(n);
  const auto tr = run_scenario(s, road("S3"), {}, {});
  EXPECT_EQ(tr.metadata().termination, "destination");
  for (std::size_t k = 0; k < tr.length(); ++k) {
    EXPECT_EQ(cat(tr, "collision", k), "false");
    EXPECT_GE(num(tr, "time_headway", k), 1.0) << "tick " << k;
  }
}

TEST(SimTest, NpcSignalsTrackTheScript) {
  auto s = straight_run(0.0, 8.0);
  NpcState n;
  n.id = "npc2";
  n.lane = "lane3";
  n.offset = 0.0;
  n.speed = 6.0;
  n.schedule = {{2.0, 0.0}};
  s.npcs.push_back(n);
  const auto tr = run_scenario(s, road("S3"), {}, {});
  ASSERT_TRUE(tr.has("npc2.x"));
  EXPECT_DOUBLE_EQ(num(tr, "npc2.x", 0), 67.0);
  EXPECT_DOUBLE_EQ(num(tr, "npc2.speed", 20), 6.0);
  // Brakes at 6 m/s^2 from t = 2 s: stopped one second later.
  EXPECT_NEAR(num(tr, "npc2.speed", 25), 3.0, 1e-9);
  EXPECT_DOUBLE_EQ(num(tr, "npc2.speed", 30), 0.0);
}

TEST(SimTest, RejectsMismatchedScenario) {
  auto s = straight_run(0.0, 8.0);
  s.road = "S1";
  EXPECT_THROW(run_scenario(s, road("S3"), {}, {}), InputError);
  s = straight_run(0.0, 8.0);
  s.ego.destination = "lane2";  // back out the way it came
  EXPECT_THROW(run_scenario(s, road("S3"), {}, {}), InputError);
  s = straight_run(0.0, 8.0);
  EXPECT_THROW(run_scenario(s, road("S2"), {}, {}), InputError);
}

TEST(SimTest, RejectsInvalidConfig) {
  SimConfig cfg;
  cfg.tick = 0.0;
  EXPECT_THROW(run_scenario(straight_run(0, 8), road("S3"), {}, cfg), ConfigError);
  EgoPolicy p;
  p.comfortable_decel = 0.0;
  EXPECT_THROW(run_scenario(straight_run(0, 8), road("S3"), p, {}), ConfigError);
}

class RandomScenarios : public ::testing::TestWithParam<std::string> {};

TEST_P(RandomScenarios, DeterministicBoundedAndPhysical) {
  const auto& r = road(GetParam());
  std::mt19937_64 rng(7);
  SimConfig cfg;
  cfg.max_duration = 40.0;
  EgoPolicy p;
  const double bound = std::max({p.accel, p.max_decel, Constants::kNpcAccel,
                                 Constants::kNpcDecel}) * cfg.tick + 1e-9;
  for (int i = 0; i < 60; ++i) {
    const auto s = codec::sample_scenario(rng, r);
    const auto a = run_scenario(s, r, p, cfg);
    const auto b = run_scenario(s, r, p, cfg);
    ASSERT_EQ(a, b);
    EXPECT_LE(a.duration(), cfg.max_duration + 1e-9);
    for (const auto& [name, sig] : a.signals()) {
      const bool speed = name == "real_speed" || name.ends_with(".speed");
      if (!speed) continue;
      const auto v = sig.values();
      for (std::size_t k = 1; k < v.size(); ++k) {
        EXPECT_LE(std::abs(v[k] - v[k - 1]), bound) << name << " tick " << k;
        EXPECT_GE(v[k], 0.0);
      }
    }
    for (const auto& name : trace_signals(s.npcs.size())) {
      EXPECT_TRUE(a.has(name)) << name;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Roads, RandomScenarios, ::testing::Values("S1", "S2", "S3", "S4"));

}  // namespace
}  // namespace lawforge::sim
