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
#include <optional>
#include <string>
#include <vector>

#include "lawforge/error.hpp"

namespace lawforge::sim {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

enum class LaneRole { kIncoming, kOutgoing };
enum class Arm { kWest, kEast, kSouth, kNorth };
enum class Turn { kLeft, kStraight, kRight };

std::string_view to_string(Arm arm);
std::string_view to_string(Turn turn);

class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Point> points);

  double length() const noexcept { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  // Point at arc length s, clamped to [0, length].
  Point at(double s) const;
  // Unit heading (dx, dy) of the segment containing s.
  Point heading(double s) const;

  void append(const Polyline& other);

 private:
  std::vector<Point> points_;
  std::vector<double> cumulative_;
};

struct Lane {
  std::string id;
  LaneRole role = LaneRole::kIncoming;
  Arm arm = Arm::kWest;
  Polyline centerline;
  // Signal group controlling this approach ("main" or "cross"); incoming only.
  std::string signal_group;
};

struct Crosswalk {
  std::string id;
  Arm arm = Arm::kWest;
  // Distance a pedestrian walks to cross the arm.
  double width = 0.0;
  // Band occupied on each lane of the arm, measured from the junction edge.
  double near = 0.5;
  double far = 4.5;
};

struct Span {
  double begin = 0.0;
  double end = 0.0;
  bool contains(double s) const { return s >= begin && s <= end; }
};

// A drivable path from a starting lane to a destination lane, parameterised
// by arc length s. Routes from an outgoing lane stay on that lane.
struct Route {
  std::string from;
  std::string to;
  Turn turn = Turn::kStraight;
  Polyline path;
  bool crosses_junction = false;
  double stop_line_s = 0.0;     // incoming routes only
  Span junction;                // [entry, exit] arc-length span of the junction
  std::string signal_group;     // of the starting lane
  struct CrosswalkSpan {
    std::string crosswalk;
    Span span;
  };
  std::vector<CrosswalkSpan> crosswalks;

  double length() const { return path.length(); }
};

class RoadStructure {
 public:
  RoadStructure(std::string tag, std::string description, double junction_half_size,
                double stop_line_setback, double speed_limit, std::vector<Lane> lanes,
                std::vector<Crosswalk> crosswalks);

  const std::string& tag() const noexcept { return tag_; }
  const std::string& description() const noexcept { return description_; }
  double junction_half_size() const noexcept { return junction_half_; }
  double speed_limit() const noexcept { return speed_limit_; }
  const std::vector<Lane>& lanes() const noexcept { return lanes_; }
  const std::vector<Crosswalk>& crosswalks() const noexcept { return crosswalks_; }

  const Lane* find_lane(std::string_view id) const;
  const Crosswalk* find_crosswalk(std::string_view id) const;
  std::vector<std::string> lane_ids() const;
  std::vector<std::string> incoming_lanes() const;
  std::vector<std::string> outgoing_lanes() const;
  std::vector<std::string> crosswalk_ids() const;

  // Route from `from` to `to`; nullptr if no such movement exists.
  const Route* route(std::string_view from, std::string_view to) const;
  std::vector<std::string> destinations(std::string_view from) const;

  bool inside_junction(Point p) const;

 private:
  void build_routes();

  std::string tag_;
  std::string description_;
  double junction_half_;
  double stop_line_setback_;
  double speed_limit_;
  std::vector<Lane> lanes_;
  std::vector<Crosswalk> crosswalks_;
  std::map<std::pair<std::string, std::string>, Route> routes_;
};

RoadStructure load_road(const std::filesystem::path& path);

// Loads <dir>/<tag>.json for a structure tag (S1..S4).
RoadStructure load_road(const std::filesystem::path& dir, std::string_view tag);

// Directory holding the shipped road files; honours LAWFORGE_DATA_DIR.
std::filesystem::path default_road_dir();

}  // namespace lawforge::sim
