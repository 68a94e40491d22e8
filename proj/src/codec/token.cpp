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

#include "token.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

namespace lawforge::codec {

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace detail {

namespace {

[[noreturn]] void fail(std::string_view token, std::string_view why) {
  throw DecodeError(DecodeError::Kind::kUnparseable,
                    "unparseable token '" + std::string(token) + "': " + std::string(why));
}

double parse_real(std::string_view token, std::string_view field) {
  double v = 0.0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    fail(token, "bad number '" + std::string(field) + "'");
  }
  return v;
}

int parse_int(std::string_view token, std::string_view field) {
  int v = 0;
  auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    fail(token, "bad integer '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

bool is_npc_id(std::string_view s) {
  if (s.size() < 4 || s.substr(0, 3) != "npc") return false;
  auto digits = s.substr(3);
  if (digits[0] == '0') return false;
  return std::all_of(digits.begin(), digits.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

int npc_number(std::string_view id) {
  int v = 0;
  std::from_chars(id.data() + 3, id.data() + id.size(), v);
  return v;
}

bool is_light_field(std::string_view s) {
  return std::find(std::begin(kLightFields), std::end(kLightFields), s) != std::end(kLightFields);
}

bool is_reserved(std::string_view s) { return s == "speed" || s == "dest" || s == "at"; }

ParsedToken parse_token(std::string_view token) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = token.find('+', start);
    parts.push_back(token.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 3) fail(token, "expected three '+'-separated fields");
  for (auto p : parts) {
    if (p.empty()) fail(token, "empty field");
  }

  ParsedToken out;
  out.entity = std::string(parts[0]);
  const auto head = parts[0];
  if (head == "time") {
    out.kind = TokenKind::kTime;
    out.hour = parse_int(token, parts[1]);
    out.value = parse_int(token, parts[2]);
  } else if (head == "weather") {
    out.kind = TokenKind::kWeather;
    if (!is_identifier(parts[1])) fail(token, "bad weather type");
    out.key = std::string(parts[1]);
    out.value = parse_real(token, parts[2]);
  } else if (head == "light") {
    out.kind = TokenKind::kLight;
    if (!is_light_field(parts[1])) fail(token, "unknown signal program field");
    out.key = std::string(parts[1]);
    out.value = parse_real(token, parts[2]);
  } else if (head == "ped") {
    out.kind = TokenKind::kPed;
    if (!is_identifier(parts[1])) fail(token, "bad crosswalk id");
    out.key = std::string(parts[1]);
    out.value = parse_real(token, parts[2]);
  } else if (head == "ego" || is_npc_id(head)) {
    const auto key = parts[1];
    if (key == "speed") {
      out.kind = TokenKind::kSpeed;
      out.value = parse_real(token, parts[2]);
    } else if (key == "dest") {
      out.kind = TokenKind::kDest;
      if (!is_identifier(parts[2]) || is_reserved(parts[2])) fail(token, "bad destination lane");
      out.key = std::string(parts[2]);
    } else if (key == "at") {
      if (head == "ego") fail(token, "the ego vehicle has no schedule");
      out.kind = TokenKind::kAt;
      out.value = parse_real(token, parts[2]);
    } else {
      if (!is_identifier(key)) fail(token, "bad lane id");
      out.kind = TokenKind::kPlace;
      out.key = std::string(key);
      out.value = parse_real(token, parts[2]);
    }
  } else {
    fail(token, "unknown token head '" + std::string(head) + "'");
  }
  return out;
}

}  // namespace detail
}  // namespace lawforge::codec
