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

#include "lawforge/road.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "../common/json_util.hpp"

namespace lawforge::sim {

namespace {

using detail::json;
constexpr int kSchemaVersion = 1;
constexpr int kConnectorSegments = 24;
constexpr double kGeomEps = 1e-6;

Point sub(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
double norm(Point a) { return std::hypot(a.x, a.y); }

Point unit(Point a) {
  double n = norm(a);
  return n > 0.0 ? Point{a.x / n, a.y / n} : Point{};
}

Arm parse_arm(const std::string& s, const std::string& path) {
  if (s == "west") return Arm::kWest;
  if (s == "east") return Arm::kEast;
  if (s == "south") return Arm::kSouth;
  if (s == "north") return Arm::kNorth;
  throw SchemaError(path, "unknown arm '" + s + "'");
}

Polyline connector(Point p0, Point h0, Point p2, Point h2, Turn turn) {
  if (turn == Turn::kStraight) return Polyline({p0, p2});
  // Control point where the two lane lines meet: p0 + a*h0 = p2 - b*h2.
  double det = h0.x * (-h2.y) - h0.y * (-h2.x);
  Point d = sub(p2, p0);
  double a = (d.x * (-h2.y) - d.y * (-h2.x)) / det;
  Point c{p0.x + a * h0.x, p0.y + a * h0.y};
  std::vector<Point> pts;
  pts.reserve(kConnectorSegments + 1);
  for (int i = 0; i <= kConnectorSegments; ++i) {
    double u = static_cast<double>(i) / kConnectorSegments;
    double w0 = (1 - u) * (1 - u), w1 = 2 * u * (1 - u), w2 = u * u;
    pts.push_back({w0 * p0.x + w1 * c.x + w2 * p2.x, w0 * p0.y + w1 * c.y + w2 * p2.y});
  }
  return Polyline(std::move(pts));
}

}  // namespace

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::kWest: return "west";
    case Arm::kEast: return "east";
    case Arm::kSouth: return "south";
    case Arm::kNorth: return "north";
  }
  return "?";
}

std::string_view to_string(Turn turn) {
  switch (turn) {
    case Turn::kLeft: return "left";
    case Turn::kStraight: return "straight";
    case Turn::kRight: return "right";
  }
  return "?";
}

Polyline::Polyline(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw InputError("a polyline needs at least two points");
  cumulative_.reserve(points_.size());
  cumulative_.push_back(0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + norm(sub(points_[i], points_[i - 1])));
  }
}

Point Polyline::at(double s) const {
  if (points_.empty()) return {};
  if (s <= 0.0) return points_.front();
  if (s >= length()) return points_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  double seg = cumulative_[i] - cumulative_[i - 1];
  double u = seg > 0.0 ? (s - cumulative_[i - 1]) / seg : 0.0;
  const Point& a = points_[i - 1];
  const Point& b = points_[i];
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

Point Polyline::heading(double s) const {
  if (points_.size() < 2) return {1.0, 0.0};
  double clamped = std::clamp(s, 0.0, length());
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), clamped);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  i = std::clamp<std::size_t>(i, 1, points_.size() - 1);
  // Skip zero-length segments.
  while (i + 1 < points_.size() && cumulative_[i] == cumulative_[i - 1]) ++i;
  return unit(sub(points_[i], points_[i - 1]));
}

void Polyline::append(const Polyline& other) {
  if (other.points_.empty()) return;
  if (points_.empty()) {
    *this = other;
    return;
  }
  std::size_t first = norm(sub(other.points_.front(), points_.back())) < kGeomEps ? 1 : 0;
  for (std::size_t i = first; i < other.points_.size(); ++i) {
    cumulative_.push_back(cumulative_.back() + norm(sub(other.points_[i], points_.back())));
    points_.push_back(other.points_[i]);
  }
}

RoadStructure::RoadStructure(std::string tag, std::string description, double junction_half_size,
                             double stop_line_setback, double speed_limit, std::vector<Lane> lanes,
                             std::vector<Crosswalk> crosswalks)
    : tag_(std::move(tag)),
      description_(std::move(description)),
      junction_half_(junction_half_size),
      stop_line_setback_(stop_line_setback),
      speed_limit_(speed_limit),
      lanes_(std::move(lanes)),
      crosswalks_(std::move(crosswalks)) {
  if (!(junction_half_ > 0.0)) throw InputError("road " + tag_ + ": junction size must be positive");
  if (!(speed_limit_ > 0.0)) throw InputError("road " + tag_ + ": speed limit must be positive");
  std::set<std::string> ids;
  for (const auto& l : lanes_) {
    if (!ids.insert(l.id).second) throw InputError("road " + tag_ + ": duplicate lane id " + l.id);
    const auto& pts = l.centerline.points();
    Point joint = l.role == LaneRole::kIncoming ? pts.back() : pts.front();
    double edge = std::max(std::abs(joint.x), std::abs(joint.y));
    if (std::abs(edge - junction_half_) > kGeomEps) {
      throw InputError("road " + tag_ + ": lane " + l.id + " does not meet the junction edge");
    }
    if (l.role == LaneRole::kIncoming && l.signal_group.empty()) {
      throw InputError("road " + tag_ + ": approach " + l.id + " has no signal group");
    }
  }
  for (const auto& c : crosswalks_) {
    if (!ids.insert(c.id).second) throw InputError("road " + tag_ + ": duplicate id " + c.id);
    if (!(c.width > 0.0) || !(c.near >= 0.0) || !(c.far > c.near)) {
      throw InputError("road " + tag_ + ": crosswalk " + c.id + " has a bad extent");
    }
    if (c.far >= stop_line_setback_) {
      throw InputError("road " + tag_ + ": crosswalk " + c.id + " overlaps the stop line");
    }
  }
  build_routes();
}

void RoadStructure::build_routes() {
  auto arm_crosswalk = [&](Arm arm) -> const Crosswalk* {
    for (const auto& c : crosswalks_) {
      if (c.arm == arm) return &c;
    }
    return nullptr;
  };

  for (const auto& in : lanes_) {
    if (in.role == LaneRole::kOutgoing) {
      Route r;
      r.from = r.to = in.id;
      r.path = in.centerline;
      r.junction = {-1.0, -1.0};
      if (const auto* c = arm_crosswalk(in.arm)) {
        r.crosswalks.push_back({c->id, {c->near, c->far}});
      }
      routes_.emplace(std::make_pair(in.id, in.id), std::move(r));
      continue;
    }
    const double l_in = in.centerline.length();
    const Point p0 = in.centerline.points().back();
    const Point h0 = in.centerline.heading(l_in);
    for (const auto& out : lanes_) {
      if (out.role != LaneRole::kOutgoing || out.arm == in.arm) continue;
      const Point p2 = out.centerline.points().front();
      const Point h2 = out.centerline.heading(0.0);
      double cross = h0.x * h2.y - h0.y * h2.x;
      double dot = h0.x * h2.x + h0.y * h2.y;
      Turn turn = dot > 0.9 ? Turn::kStraight : (cross > 0.0 ? Turn::kLeft : Turn::kRight);

      Route r;
      r.from = in.id;
      r.to = out.id;
      r.turn = turn;
      r.crosses_junction = true;
      r.signal_group = in.signal_group;
      r.path = in.centerline;
      Polyline link = connector(p0, h0, p2, h2, turn);
      r.path.append(link);
      const double exit = l_in + link.length();
      r.path.append(out.centerline);
      r.stop_line_s = l_in - stop_line_setback_;
      r.junction = {l_in, exit};
      if (const auto* c = arm_crosswalk(in.arm)) {
        r.crosswalks.push_back({c->id, {l_in - c->far, l_in - c->near}});
      }
      if (const auto* c = arm_crosswalk(out.arm)) {
        r.crosswalks.push_back({c->id, {exit + c->near, exit + c->far}});
      }
      routes_.emplace(std::make_pair(in.id, out.id), std::move(r));
    }
  }
}

const Lane* RoadStructure::find_lane(std::string_view id) const {
  for (const auto& l : lanes_) {
    if (l.id == id) return &l;
  }
  return nullptr;
}

const Crosswalk* RoadStructure::find_crosswalk(std::string_view id) const {
  for (const auto& c : crosswalks_) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::vector<std::string> RoadStructure::lane_ids() const {
  std::vector<std::string> out;
  for (const auto& l : lanes_) out.push_back(l.id);
  return out;
}

std::vector<std::string> RoadStructure::incoming_lanes() const {
  std::vector<std::string> out;
  for (const auto& l : lanes_) {
    if (l.role == LaneRole::kIncoming) out.push_back(l.id);
  }
  return out;
}

std::vector<std::string> RoadStructure::outgoing_lanes() const {
  std::vector<std::string> out;
  for (const auto& l : lanes_) {
    if (l.role == LaneRole::kOutgoing) out.push_back(l.id);
  }
  return out;
}

std::vector<std::string> RoadStructure::crosswalk_ids() const {
  std::vector<std::string> out;
  for (const auto& c : crosswalks_) out.push_back(c.id);
  return out;
}

const Route* RoadStructure::route(std::string_view from, std::string_view to) const {
  auto it = routes_.find(std::make_pair(std::string(from), std::string(to)));
  return it == routes_.end() ? nullptr : &it->second;
}

std::vector<std::string> RoadStructure::destinations(std::string_view from) const {
  std::vector<std::string> out;
  for (const auto& [key, r] : routes_) {
    if (key.first == from) out.push_back(key.second);
  }
  return out;
}

bool RoadStructure::inside_junction(Point p) const {
  return std::abs(p.x) <= junction_half_ && std::abs(p.y) <= junction_half_;
}

RoadStructure load_road(const std::filesystem::path& path) {
  const json doc = detail::read_json_file(path);
  detail::check_schema_version(doc, kSchemaVersion);
  const auto tag = detail::require_string(doc, "tag", "");
  const auto description = doc.value("description", std::string());
  const double half = detail::require_number(doc, "junction_half_size", "");
  const double setback = detail::require_number(doc, "stop_line_setback", "");
  const double limit = detail::require_number(doc, "speed_limit", "");

  std::vector<Lane> lanes;
  const auto& jl = detail::require_array(doc, "lanes", "");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string p = "/lanes/" + std::to_string(i);
    Lane lane;
    lane.id = detail::require_string(jl[i], "id", p);
    const auto role = detail::require_string(jl[i], "role", p);
    if (role == "incoming") {
      lane.role = LaneRole::kIncoming;
    } else if (role == "outgoing") {
      lane.role = LaneRole::kOutgoing;
    } else {
      throw SchemaError(p + "/role", "expected incoming or outgoing");
    }
    lane.arm = parse_arm(detail::require_string(jl[i], "arm", p), p + "/arm");
    lane.signal_group = jl[i].value("signal_group", std::string());
    std::vector<Point> pts;
    const auto& cl = detail::require_array(jl[i], "centerline", p);
    for (std::size_t k = 0; k < cl.size(); ++k) {
      if (!cl[k].is_array() || cl[k].size() != 2 || !cl[k][0].is_number() || !cl[k][1].is_number()) {
        throw SchemaError(p + "/centerline/" + std::to_string(k), "expected [x, y]");
      }
      pts.push_back({cl[k][0].get<double>(), cl[k][1].get<double>()});
    }
    if (pts.size() < 2) throw SchemaError(p + "/centerline", "needs at least two points");
    lane.centerline = Polyline(std::move(pts));
    lanes.push_back(std::move(lane));
  }

  std::vector<Crosswalk> crosswalks;
  if (auto it = doc.find("crosswalks"); it != doc.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "/crosswalks/" + std::to_string(i);
      const auto& jc = (*it)[i];
      Crosswalk c;
      c.id = detail::require_string(jc, "id", p);
      c.arm = parse_arm(detail::require_string(jc, "arm", p), p + "/arm");
      c.width = detail::require_number(jc, "width", p);
      c.near = jc.value("near", c.near);
      c.far = jc.value("far", c.far);
      crosswalks.push_back(std::move(c));
    }
  }
  return RoadStructure(tag, description, half, setback, limit, std::move(lanes),
                       std::move(crosswalks));
}

RoadStructure load_road(const std::filesystem::path& dir, std::string_view tag) {
  auto path = dir / (std::string(tag) + ".json");
  if (!std::filesystem::exists(path)) {
    throw InputError("unknown road structure '" + std::string(tag) + "' (no " + path.string() + ")");
  }
  auto road = load_road(path);
  if (road.tag() != tag) throw InputError(path.string() + ": tag does not match file name");
  return road;
}

std::filesystem::path default_road_dir() {
  if (const char* env = std::getenv("LAWFORGE_DATA_DIR")) {
    return std::filesystem::path(env) / "roads";
  }
#ifdef LAWFORGE_DEFAULT_DATA_DIR
  return std::filesystem::path(LAWFORGE_DEFAULT_DATA_DIR) / "roads";
#else
  return "data/roads";
#endif
}

}  // namespace lawforge::sim
