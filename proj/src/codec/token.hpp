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

// Lexical layer shared by the decoder and the vocabulary quantizer.

#include <string>
#include <string_view>

#include "lawforge/codec.hpp"

namespace lawforge::codec::detail {

enum class TokenKind { kTime, kWeather, kLight, kPlace, kSpeed, kDest, kAt, kPed };

struct ParsedToken {
  TokenKind kind = TokenKind::kTime;
  std::string entity;  // "time", "weather", "light", "ped", "ego" or "npcK"
  std::string key;     // weather type, light field, lane or crosswalk id
  double value = 0.0;
  int hour = 0;
};

// Throws DecodeError(kUnparseable).
ParsedToken parse_token(std::string_view token);

bool is_identifier(std::string_view s);
bool is_npc_id(std::string_view s);
// Numeric suffix of "npcK".
int npc_number(std::string_view id);

inline constexpr std::string_view kLightFields[] = {"main_green", "main_yellow", "cross_green",
                                                      "cross_yellow", "offset"};

bool is_light_field(std::string_view s);
bool is_reserved(std::string_view s);

}  // namespace lawforge::codec::detail
