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
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "lawforge/sim.hpp"

namespace lawforge::sim {

namespace {

using C = Constants;

constexpr double kStopped = 0.1;
constexpr double kArrived = 1e-9;
constexpr double kSampleStep = 0.5;
constexpr double kConflictRadius = 2.0;

enum class Light { kGreen, kYellow, kRed };

std::string_view light_name(Light l) {
  switch (l) {
    case Light::kGreen: return "green";
    case Light::kYellow: return "yellow";
    case Light::kRed: return "red";
  }
  return "none";
}

Light light_state(const codec::SignalProgram& p, const std::string& group, double t) {
  const double cycle = p.cycle();
  double tc = std::fmod(t + p.offset, cycle);
  if (tc < 0.0) tc += cycle;
  const double main_end = p.main_green + p.main_yellow;
  if (group == "main") {
    if (tc < p.main_green) return Light::kGreen;
    return tc < main_end ? Light::kYellow : Light::kRed;
  }
  if (tc < main_end) return Light::kRed;
  return tc < main_end + p.cross_green ? Light::kGreen : Light::kYellow;
}

struct Box {
  double x0, x1, y0, y1;
};

Box box_at(const Polyline& path, double s) {
  const Point p = path.at(s);
  const Point h = path.heading(s);
  const double hl = C::kVehicleLength / 2.0;
  const double hw = C::kVehicleWidth / 2.0;
  const double ex = std::abs(h.x) * hl + std::abs(h.y) * hw;
  const double ey = std::abs(h.y) * hl + std::abs(h.x) * hw;
  return {p.x - ex, p.x + ex, p.y - ey, p.y + ey};
}

bool overlap(const Box& a, const Box& b) {
  return a.x0 < b.x1 && b.x0 < a.x1 && a.y0 < b.y1 && b.y0 < a.y1;
}

// Acceleration that moves v toward `target` within one tick.
double approach(double v, double target, double dt, double up, double down) {
  return std::clamp((target - v) / dt, -down, up);
}

// Acceleration to arrive `dist` ahead at speed `goal`: brake with the exact
// constant deceleration once it reaches the comfortable level, otherwise
// keep speed under the comfortable braking envelope.
double reach(double v, double dist, double goal, double dt, const EgoPolicy& p) {
  if (dist <= 0.01) return approach(v, goal, dt, p.accel, p.max_decel);
  const double demand = (v * v - goal * goal) / (2.0 * dist);
  if (v > goal && demand >= p.comfortable_decel) return -demand;
  return approach(v, std::sqrt(goal * goal + 2.0 * p.comfortable_decel * dist), dt, p.accel,
                  p.comfortable_decel);
}

// Integrates one tick of constant acceleration, stopping at zero speed.
void advance(double& s, double& v, double a, double dt) {
  const double nv = v + a * dt;
  if (nv < 0.0) {
    s += a < 0.0 ? v * v / (-2.0 * a) : 0.0;
    v = 0.0;
    return;
  }
  s += (v + nv) / 2.0 * dt;
  v = nv;
}

struct Conflict {
  bool exists = false;
  double ego_s = 0.0;
  double npc_s = 0.0;
};

// First point along the ego path, near the junction, that comes within
// kConflictRadius of the NPC path.
Conflict find_conflict(const Route& ego, const Route& npc) {
  Conflict c;
  if (!npc.crosses_junction || npc.from == ego.from) return c;
  auto samples = [](const Route& r) {
    std::vector<std::pair<double, Point>> out;
    const double lo = std::max(0.0, r.junction.begin - 2.0);
    const double hi = std::min(r.length(), r.junction.end + 6.0);
    for (double s = lo; s <= hi + 1e-9; s += kSampleStep) out.emplace_back(s, r.path.at(s));
    return out;
  };
  const auto es = samples(ego);
  const auto ns = samples(npc);
  for (const auto& [se, pe] : es) {
    double best = kConflictRadius;
    for (const auto& [sn, pn] : ns) {
      const double d = std::hypot(pe.x - pn.x, pe.y - pn.y);
      if (d < best) {
        best = d;
        c.exists = true;
        c.npc_s = sn;
      }
    }
    if (c.exists) {
      c.ego_s = se;
      return c;
    }
  }
  return c;
}

int turn_rank(Turn t) {
  switch (t) {
    case Turn::kStraight: return 0;
    case Turn::kRight: return 1;
    case Turn::kLeft: return 2;
  }
  return 0;
}

struct Npc {
  const codec::NpcState* script = nullptr;
  const Route* route = nullptr;
  double s = 0.0;
  double v = 0.0;
  bool active = true;
  Conflict conflict;
  bool outranks_ego = false;
  Point last{};
};

// Lane-relative position of a vehicle: the lane it occupies (or "junction")
// and the offset along it.
std::pair<std::string, double> lane_position(const Route& r, double s) {
  if (!r.crosses_junction) return {r.from, s};
  if (s < r.junction.begin) return {r.from, s};
  if (s <= r.junction.end) return {"junction", s - r.junction.begin};
  return {r.to, s - r.junction.end};
}

// Position of an NPC expressed in ego route arc length, if it shares the
// ego's path at its current location.
std::optional<double> on_ego_path(const Route& ego, const Npc& n) {
  const Route& r = *n.route;
  if (r.crosses_junction && n.s >= r.junction.begin && n.s <= r.junction.end) {
    if (r.from == ego.from && r.to == ego.to) return n.s;
    return std::nullopt;
  }
  const auto [lane, off] = lane_position(r, n.s);
  if (lane == ego.from) return off;
  if (lane == ego.to) return ego.junction.end + off;
  return std::nullopt;
}

class Run {
 public:
  Run(const codec::Scenario& sc, const RoadStructure& road, const EgoPolicy& p,
      const SimConfig& cfg)
      : sc_(sc), road_(road), p_(p), cfg_(cfg) {
    ego_route_ = road.route(sc.ego.lane, sc.ego.destination);
    if (ego_route_ == nullptr || !ego_route_->crosses_junction) {
      throw InputError("scenario/road mismatch: ego cannot drive from " + sc.ego.lane + " to " +
                       sc.ego.destination);
    }
    s_ = sc.ego.offset;
    v_ = sc.ego.speed;
    for (const auto& n : sc.npcs) {
      Npc npc;
      npc.script = &n;
      const std::string to = n.destination ? *n.destination : default_destination(n.lane);
      npc.route = road.route(n.lane, to);
      if (npc.route == nullptr) {
        throw InputError("scenario/road mismatch: " + n.id + " cannot drive from " + n.lane +
                         " to " + to);
      }
      npc.s = n.offset;
      npc.v = n.speed;
      npc.conflict = find_conflict(*ego_route_, *npc.route);
      npc.outranks_ego = turn_rank(npc.route->turn) < turn_rank(ego_route_->turn);
      npc.last = npc.route->path.at(npc.s);
      npcs_.push_back(npc);
    }
    const auto weather = [&](const char* key) {
      auto it = sc.weather.find(key);
      return it == sc.weather.end() ? 0.0 : it->second;
    };
    const double fog = weather("fog");
    friction_ = 1.0 - 0.5 * std::max(weather("rain"), weather("wetness"));
    sight_ = 150.0 * (1.0 - 0.75 * fog);
    const bool night = sc.time.hour >= 19 || sc.time.hour < 6;
    low_visibility_ = night || fog >= C::kFogVisibility;
    headlights_ = night || (p.headlights_in_fog && fog >= C::kFogVisibility);
  }

  trace::Trace execute(const std::string& scenario_id) {
    trace::TraceBuilder b(cfg_.tick);
    declare(b);
    const double dt = cfg_.tick;
    const std::size_t max_ticks =
        static_cast<std::size_t>(std::ceil(cfg_.max_duration / dt - 1e-9));
    std::string why = "max_duration";
    double stopped_for = 0.0;
    for (std::size_t k = 0; k < max_ticks; ++k) {
      const double t = static_cast<double>(k) * dt;
      const bool crashed = record(b, t);
      if (crashed) {
        why = "collision";
        break;
      }
      if (stopped_for >= cfg_.blockage_timeout - 1e-9) {
        why = "timeout";
        break;
      }
      step(t);
      stopped_for = v_ < kStopped ? stopped_for + dt : 0.0;
      if (s_ >= ego_route_->length() - kArrived) {
        why = "destination";
        break;
      }
    }
    return std::move(b).finish({scenario_id, cfg_.seed, why});
  }

 private:
  std::string default_destination(const std::string& lane) const {
    const auto dests = road_.destinations(lane);
    if (dests.empty()) return lane;
    for (const auto& d : dests) {
      const Route* r = road_.route(lane, d);
      if (r != nullptr && r->turn == Turn::kStraight) return d;
    }
    return dests.front();
  }

  void declare(trace::TraceBuilder& b) const {
    for (const char* n : {"real_speed", "speed", "length", "speed_limit", "stopline_ahead",
                          "junction_ahead", "crosswalk_ahead", "time_headway", "offset", "x",
                          "y"}) {
      b.declare_numeric(n);
    }
    auto lanes = road_.lane_ids();
    lanes.push_back("junction");
    b.declare_categorical("lane", lanes);
    b.declare_categorical("direction", {"left", "straight", "right"});
    const std::vector<std::string> colors = {"red", "yellow", "green", "none"};
    b.declare_categorical("traffic_light_ahead.color", colors);
    b.declare_categorical("traffic_light_ahead.direction.color", colors);
    for (const char* n : {"priority_npc_ahead", "priority_peds_ahead", "in_junction", "collision",
                          "headlights", "low_visibility"}) {
      b.declare_categorical(n, {"false", "true"});
    }
    for (const auto& n : npcs_) {
      for (const char* f : {".x", ".y", ".speed"}) b.declare_numeric(n.script->id + f);
    }
  }

  bool crosswalk_occupied(const std::string& id, double t) const {
    const Crosswalk* cw = road_.find_crosswalk(id);
    for (const auto& p : sc_.pedestrians) {
      if (p.crosswalk == id && t >= p.start &&
          t <= p.start + cw->width / C::kPedestrianSpeed) {
        return true;
      }
    }
    return false;
  }

  // Nearest NPC ahead on the ego path: (bumper gap, speed).
  std::optional<std::pair<double, double>> leader() const {
    std::optional<std::pair<double, double>> best;
    for (const auto& n : npcs_) {
      if (!n.active) continue;
      const auto pos = on_ego_path(*ego_route_, n);
      if (!pos || *pos <= s_) continue;
      const double gap = *pos - s_ - C::kVehicleLength;
      if (!best || gap < best->first) best = std::make_pair(gap, n.v);
    }
    return best;
  }

  // Smallest time-to-conflict among NPCs holding priority over the ego, if
  // any is within the priority horizon.
  std::optional<double> priority_ttc() const {
    const Route& r = *ego_route_;
    if (r.junction.begin - s_ > C::kAttentionRange) return std::nullopt;
    std::optional<double> best;
    for (const auto& n : npcs_) {
      if (!n.active || !n.conflict.exists || s_ >= n.conflict.ego_s) continue;
      if (n.s >= n.conflict.npc_s) continue;
      const bool inside = n.s >= n.route->junction.begin;
      if (!inside && !n.outranks_ego) continue;
      const double ttc = (n.conflict.npc_s - n.s) / std::max(n.v, kStopped);
      if (ttc > C::kPriorityHorizon) continue;
      if (!best || ttc < *best) best = ttc;
    }
    return best;
  }

  bool peds_ahead(double t) const {
    for (const auto& c : ego_route_->crosswalks) {
      if (c.span.end < s_ || c.span.begin - s_ > C::kAttentionRange) continue;
      if (crosswalk_occupied(c.crosswalk, t)) return true;
    }
    return false;
  }

  bool record(trace::TraceBuilder& b, double t) {
    const Route& r = *ego_route_;
    const Point pos = r.path.at(s_);
    const Box ego_box = box_at(r.path, s_);
    bool crashed = false;
    for (const auto& n : npcs_) {
      if (n.active && overlap(ego_box, box_at(n.route->path, n.s))) crashed = true;
    }
    const auto [lane, off] = lane_position(r, s_);
    const bool in_junction = r.junction.contains(s_);
    const bool before_exit = s_ <= r.junction.end;

    double crosswalk = C::kNoTarget;
    for (const auto& c : r.crosswalks) {
      if (c.span.contains(s_)) {
        crosswalk = 0.0;
      } else if (c.span.begin > s_) {
        crosswalk = std::min(crosswalk, c.span.begin - s_);
      }
    }
    double headway = C::kMaxHeadway;
    if (const auto lead = leader(); lead && v_ >= kStopped) {
      headway = std::clamp(lead->first / v_, 0.0, C::kMaxHeadway);
    }
    const Light light = light_state(sc_.lights, r.signal_group, t);
    const std::string_view color = before_exit ? light_name(light) : "none";

    b.set("real_speed", v_);
    b.set("speed", C::kMovingSpeed);
    b.set("length", C::kDistanceBudget);
    b.set("speed_limit", road_.speed_limit());
    b.set("stopline_ahead", before_exit ? r.stop_line_s - s_ : C::kNoTarget);
    b.set("junction_ahead", s_ < r.junction.begin ? r.junction.begin - s_
                            : before_exit         ? 0.0
                                                  : C::kNoTarget);
    b.set("crosswalk_ahead", crosswalk);
    b.set("time_headway", headway);
    b.set("offset", off);
    b.set("x", pos.x);
    b.set("y", pos.y);
    b.set("lane", lane);
    b.set("direction", to_string(r.turn));
    b.set("traffic_light_ahead.color", color);
    b.set("traffic_light_ahead.direction.color", r.turn == Turn::kRight ? "none" : color);
    b.set("priority_npc_ahead", priority_ttc() ? "true" : "false");
    b.set("priority_peds_ahead", peds_ahead(t) ? "true" : "false");
    b.set("in_junction", in_junction ? "true" : "false");
    b.set("collision", crashed ? "true" : "false");
    b.set("headlights", headlights_ ? "true" : "false");
    b.set("low_visibility", low_visibility_ ? "true" : "false");
    for (const auto& n : npcs_) {
      b.set(n.script->id + ".x", n.last.x);
      b.set(n.script->id + ".y", n.last.y);
      b.set(n.script->id + ".speed", n.v);
    }
    b.commit_tick();
    return crashed;
  }

  double ego_accel(double t) const {
    const Route& r = *ego_route_;
    const double dt = cfg_.tick;
    double a = approach(v_, p_.cruise_speed, dt, p_.accel, p_.comfortable_decel);
    if (r.turn != Turn::kStraight) {
      if (s_ < r.junction.begin) {
        a = std::min(a, reach(v_, r.junction.begin - s_, p_.turn_speed, dt, p_));
      } else if (s_ <= r.junction.end) {
        a = std::min(a, approach(v_, p_.turn_speed, dt, p_.accel, p_.comfortable_decel));
      }
    }

    const double to_line = r.stop_line_s - s_;
    const double stop_dist = to_line - C::kStopMargin;
    bool hold = false;
    if (to_line > 0.0) {
      if (p_.stop_on_red && to_line <= sight_) {
        const Light light = light_state(sc_.lights, r.signal_group, t);
        if (light == Light::kRed) {
          hold = !(r.turn == Turn::kRight && p_.right_on_red);
        } else if (light == Light::kYellow) {
          hold = v_ * v_ / (2.0 * p_.comfortable_decel) <= stop_dist;
        }
      }
      if (p_.yield_to_priority) {
        if (const auto ttc = priority_ttc(); ttc && *ttc < p_.gap_acceptance) hold = true;
      }
    }
    if (hold) a = std::min(a, reach(v_, std::max(stop_dist, 0.0), 0.0, dt, p_));

    if (p_.yield_to_pedestrians) {
      for (const auto& c : r.crosswalks) {
        const bool approach_side = c.span.end <= r.junction.begin;
        if (c.span.begin <= s_ || !crosswalk_occupied(c.crosswalk, t)) continue;
        if (approach_side) {
          a = std::min(a, reach(v_, std::max(c.span.begin - 1.0 - s_, 0.0), 0.0, dt, p_));
        } else if (p_.check_exit_crosswalk) {
          const double target = to_line > 0.0 ? stop_dist : c.span.begin - 1.0 - s_;
          a = std::min(a, reach(v_, std::max(target, 0.0), 0.0, dt, p_));
        }
      }
    }

    if (const auto lead = leader(); lead && lead->first < 100.0) {
      const auto [gap, lv] = *lead;
      const double desired = C::kStandstillGap + p_.reaction_gap * v_;
      double follow = 0.25 * (gap - desired) + 0.6 * (lv - v_);
      follow = std::min(follow, reach(v_, std::max(gap - C::kStandstillGap, 0.0), lv, dt, p_));
      a = std::min(a, follow);
    }
    a = std::clamp(a, -p_.max_decel, p_.accel);
    // Braking authority drops on wet roads; the planner does not know.
    return std::max(a, -p_.max_decel * friction_);
  }

  void step(double t) {
    const double dt = cfg_.tick;
    const double a = ego_accel(t);
    for (auto& n : npcs_) {
      if (!n.active) continue;
      double target = n.script->speed;
      for (const auto& c : n.script->schedule) {
        if (t >= c.time - 1e-9) target = c.speed;
      }
      double nv = n.v + std::clamp(target - n.v, -C::kNpcDecel * dt, C::kNpcAccel * dt);
      if (std::abs(nv - target) < 1e-9) nv = target;
      n.s += (n.v + nv) / 2.0 * dt;
      n.v = nv;
      if (n.s >= n.route->length() - kArrived) {
        n.s = n.route->length();
        n.active = false;
      }
      n.last = n.route->path.at(n.s);
    }
    advance(s_, v_, a, dt);
  }

  const codec::Scenario& sc_;
  const RoadStructure& road_;
  const EgoPolicy& p_;
  const SimConfig& cfg_;
  const Route* ego_route_ = nullptr;
  double s_ = 0.0;
  double v_ = 0.0;
  std::vector<Npc> npcs_;
  double friction_ = 1.0;
  double sight_ = 150.0;
  bool low_visibility_ = false;
  bool headlights_ = false;
};

}  // namespace

void EgoPolicy::validate() const {
  if (!(cruise_speed > 0.0)) throw ConfigError("ego cruise speed must be positive");
  if (!(turn_speed > 0.0)) throw ConfigError("ego turn speed must be positive");
  if (!(accel > 0.0)) throw ConfigError("ego acceleration must be positive");
  if (!(comfortable_decel > 0.0)) throw ConfigError("ego deceleration must be positive");
  if (!(max_decel >= comfortable_decel)) {
    throw ConfigError("ego maximum deceleration must be at least the comfortable one");
  }
  if (!(reaction_gap >= 0.0)) throw ConfigError("ego reaction gap must be non-negative");
  if (!(gap_acceptance >= 0.0)) throw ConfigError("ego gap acceptance must be non-negative");
}

void SimConfig::validate() const {
  if (!(tick > 0.0)) throw ConfigError("tick must be positive");
  if (!(max_duration > 0.0)) throw ConfigError("max duration must be positive");
  if (!(blockage_timeout > 0.0)) throw ConfigError("blockage timeout must be positive");
}

std::set<std::string> trace_signals(std::size_t npc_count) {
  std::set<std::string> out = {"real_speed",
                               "speed",
                               "length",
                               "speed_limit",
                               "stopline_ahead",
                               "junction_ahead",
                               "crosswalk_ahead",
                               "time_headway",
                               "offset",
                               "x",
                               "y",
                               "lane",
                               "direction",
                               "traffic_light_ahead.color",
                               "traffic_light_ahead.direction.color",
                               "priority_npc_ahead",
                               "priority_peds_ahead",
                               "in_junction",
                               "collision",
                               "headlights",
                               "low_visibility"};
  for (std::size_t i = 1; i <= npc_count; ++i) {
    const std::string id = "npc" + std::to_string(i);
    out.insert({id + ".x", id + ".y", id + ".speed"});
  }
  return out;
}

trace::Trace run_scenario(const codec::Scenario& scenario, const RoadStructure& road,
                          const EgoPolicy& ego, const SimConfig& cfg,
                          const std::string& scenario_id) {
  ego.validate();
  cfg.validate();
  if (scenario.road != road.tag()) {
    throw InputError("scenario/road mismatch: scenario targets " + scenario.road + ", road is " +
                     road.tag());
  }
  codec::check_invariants(scenario, road);
  return Run(scenario, road, ego, cfg).execute(scenario_id);
}

}  // namespace lawforge::sim
