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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lawforge/error.hpp"
#include "lawforge/road.hpp"
#include "lawforge/scenario.hpp"

namespace lawforge::codec {

// Action units such as "time+8+2", "ego+lane1+0.5" or "npc1+speed+3.7".
struct ActionSequence {
  std::vector<std::string> tokens;
  std::optional<double> reward;
  friend bool operator==(const ActionSequence&, const ActionSequence&) = default;
};

class DecodeError : public InputError {
 public:
  enum class Kind { kUnparseable, kUnknownReference, kDuplicate, kMissingField, kOrder };
  DecodeError(Kind kind, const std::string& what) : InputError(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Raised when a value falls outside the vocabulary's quantization range.
class RangeError : public InputError {
 public:
  using InputError::InputError;
};

struct ClampNote {
  std::size_t token_index = 0;
  std::string field;
  double original = 0.0;
  double clamped = 0.0;
};

struct DecodeResult {
  Scenario scenario;
  std::vector<ClampNote> clamped;
};

ActionSequence encode(const Scenario& s);
// Also checks every lane and crosswalk against the road structure.
ActionSequence encode(const Scenario& s, const sim::RoadStructure& road);

DecodeResult decode(const ActionSequence& seq, const sim::RoadStructure& road);

// Number formatting used inside tokens: shortest form that reads back exactly.
std::string format_number(double v);

struct Bins {
  double width = 1.0;
  double lo = 0.0;
  double hi = 1.0;

  std::size_t count() const;
  // Bin holding v; RangeError outside [lo, hi].
  std::size_t index(double v) const;
  // Representative (lower edge) of bin i.
  double value(std::size_t i) const;
  friend bool operator==(const Bins&, const Bins&) = default;
};

struct VocabSpec {
  Bins speed{0.5, 0.0, 20.0};
  Bins offset{0.5, 0.0, 50.0};
  Bins intensity{0.05, 0.0, 1.0};
  Bins minute{10.0, 0.0, 59.0};
  Bins green{1.0, 1.0, 90.0};
  Bins yellow{0.5, 0.0, 10.0};
  Bins signal_offset{1.0, 0.0, 90.0};
  Bins event_time{0.5, 0.0, 30.0};
  std::size_t max_npcs = 4;
  friend bool operator==(const VocabSpec&, const VocabSpec&) = default;
};

class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;

  // Every token a scenario on `road` can produce after quantization.
  static Vocabulary build(const sim::RoadStructure& road, const VocabSpec& spec = {});

  Vocabulary(std::string road, VocabSpec spec, std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  const std::string& road() const noexcept { return road_; }
  const VocabSpec& spec() const noexcept { return spec_; }
  const std::string& token(int id) const;
  std::optional<int> find(std::string_view token) const;
  bool is_special(int id) const noexcept { return id >= 0 && id <= kEos; }

  // Snaps the numeric field of a token onto its bin representative.
  std::string quantize(std::string_view token) const;

  // FNV-1a over the token list; checkpoints refuse a different vocabulary.
  std::uint64_t hash() const;

  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

 private:
  std::string road_;
  VocabSpec spec_;
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

std::vector<int> tokenize(const ActionSequence& seq, const Vocabulary& vocab);
// Stops at EOS; PAD and BOS are skipped.
ActionSequence detokenize(std::span<const int> ids, const Vocabulary& vocab);

// Sequence dataset files: JSON lines {"id", "road", "tokens", "reward"?}.
struct SequenceRecord {
  std::string id;
  std::string road;
  ActionSequence sequence;
};
std::vector<SequenceRecord> load_sequences(const std::filesystem::path& path);
void store_sequences(const std::vector<SequenceRecord>& records, const std::filesystem::path& path);

}  // namespace lawforge::codec
