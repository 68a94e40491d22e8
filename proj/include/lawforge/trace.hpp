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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "lawforge/error.hpp"

namespace lawforge::trace {

enum class SignalType { kNumeric, kCategorical };

using SignalValue = std::variant<double, std::string>;

/// A single sampled signal. Numeric signals store doubles; categorical
/// signals store indices into a declared finite alphabet.
class Signal {
 public:
  static Signal numeric(std::string name, std::vector<double> values);
  static Signal categorical(std::string name, std::vector<std::string> alphabet,
                            std::vector<std::uint32_t> codes);

  const std::string& name() const noexcept { return name_; }
  SignalType type() const noexcept { return type_; }
  bool is_numeric() const noexcept { return type_ == SignalType::kNumeric; }
  std::size_t size() const noexcept {
    return is_numeric() ? values_.size() : codes_.size();
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint32_t> codes() const noexcept { return codes_; }
  const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }

  // Alphabet index of `symbol`, if declared.
  std::optional<std::uint32_t> code_of(std::string_view symbol) const;
  SignalValue at(std::size_t index) const;

  friend bool operator==(const Signal&, const Signal&) = default;

 private:
  std::string name_;
  SignalType type_ = SignalType::kNumeric;
  std::vector<double> values_;
  std::vector<std::string> alphabet_;
  std::vector<std::uint32_t> codes_;
};

struct TraceMetadata {
  std::string scenario_id;
  std::uint64_t seed = 0;
  // Why the producing run stopped ("destination", "collision", "timeout",
  // "max_duration"); empty for hand-built traces.
  std::string termination;

  friend bool operator==(const TraceMetadata&, const TraceMetadata&) = default;
};

/// Piecewise-constant record of a run: every signal holds `length()` samples
/// taken at a fixed step, and the value at time t is the sample at
/// floor(t / step).
class Trace {
 public:
  Trace(double step, std::vector<Signal> signals, TraceMetadata meta = {});

  double step() const noexcept { return step_; }
  std::size_t length() const noexcept { return length_; }
  double duration() const noexcept { return static_cast<double>(length_) * step_; }
  const TraceMetadata& metadata() const noexcept { return meta_; }

  bool has(std::string_view name) const;
  const Signal& signal(std::string_view name) const;
  const std::map<std::string, Signal, std::less<>>& signals() const noexcept {
    return signals_;
  }

  // Sample index for time t in [0, duration]; t == duration maps to the
  // last sample.
  std::size_t index_at(double t) const;
  SignalValue value_at(std::string_view name, double t) const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  double step_;
  std::size_t length_ = 0;
  std::map<std::string, Signal, std::less<>> signals_;
  TraceMetadata meta_;
};

/// Incremental construction, one tick at a time. Signals must be declared
/// before the first tick and every declared signal must be set on every tick.
class TraceBuilder {
 public:
  explicit TraceBuilder(double step);

  void declare_numeric(const std::string& name);
  void declare_categorical(const std::string& name, std::vector<std::string> alphabet);

  void set(const std::string& name, double value);
  void set(const std::string& name, std::string_view symbol);
  // Closes the current tick; throws if some signal was left unset.
  void commit_tick();

  std::size_t ticks() const noexcept { return ticks_; }
  Trace finish(TraceMetadata meta) &&;

 private:
  struct Column {
    SignalType type;
    std::vector<double> values;
    std::vector<std::string> alphabet;
    std::vector<std::uint32_t> codes;
    bool set_this_tick = false;
  };
  Column& column(const std::string& name);

  double step_;
  std::size_t ticks_ = 0;
  std::map<std::string, Column, std::less<>> columns_;
};

// JSONL persistence: a header record followed by one record per tick.
void store_trace(const Trace& trace, const std::filesystem::path& path);
Trace load_trace(const std::filesystem::path& path);

void write_trace(const Trace& trace, std::ostream& out);
Trace read_trace(std::istream& in);

}  // namespace lawforge::trace
