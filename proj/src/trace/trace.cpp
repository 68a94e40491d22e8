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

#include "lawforge/trace.hpp"

#include <algorithm>
#include <cmath>

namespace lawforge::trace {

Signal Signal::numeric(std::string name, std::vector<double> values) {
  Signal s;
  s.name_ = std::move(name);
  s.type_ = SignalType::kNumeric;
  s.values_ = std::move(values);
  return s;
}

Signal Signal::categorical(std::string name, std::vector<std::string> alphabet,
                           std::vector<std::uint32_t> codes) {
  for (auto c : codes) {
    if (c >= alphabet.size()) {
      throw InputError("signal '" + name + "': value code " + std::to_string(c) +
                       " outside alphabet of size " + std::to_string(alphabet.size()));
    }
  }
  Signal s;
  s.name_ = std::move(name);
  s.type_ = SignalType::kCategorical;
  s.alphabet_ = std::move(alphabet);
  s.codes_ = std::move(codes);
  return s;
}

std::optional<std::uint32_t> Signal::code_of(std::string_view symbol) const {
  auto it = std::find(alphabet_.begin(), alphabet_.end(), symbol);
  if (it == alphabet_.end()) return std::nullopt;
  return static_cast<std::uint32_t>(it - alphabet_.begin());
}

SignalValue Signal::at(std::size_t index) const {
  if (is_numeric()) return values_.at(index);
  return alphabet_[codes_.at(index)];
}

Trace::Trace(double step, std::vector<Signal> signals, TraceMetadata meta)
    : step_(step), meta_(std::move(meta)) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw InputError("trace time step must be positive and finite");
  }
  bool first = true;
  for (auto& s : signals) {
    if (first) {
      length_ = s.size();
      first = false;
    } else if (s.size() != length_) {
      throw InputError("signal '" + s.name() + "' has " + std::to_string(s.size()) +
                       " samples, expected " + std::to_string(length_));
    }
    auto name = s.name();
    if (!signals_.emplace(name, std::move(s)).second) {
      throw InputError("duplicate signal '" + name + "'");
    }
  }
}

bool Trace::has(std::string_view name) const { return signals_.find(name) != signals_.end(); }

const Signal& Trace::signal(std::string_view name) const {
  auto it = signals_.find(name);
  if (it == signals_.end()) throw InputError("unknown signal '" + std::string(name) + "'");
  return it->second;
}

std::size_t Trace::index_at(double t) const {
  if (length_ == 0) throw InputError("empty trace");
  if (!(t >= 0.0) || t > duration()) {
    throw InputError("time " + std::to_string(t) + " outside trace domain [0, " +
                     std::to_string(duration()) + "]");
  }
  auto idx = static_cast<std::size_t>(std::floor(t / step_));
  return std::min(idx, length_ - 1);
}

SignalValue Trace::value_at(std::string_view name, double t) const {
  const auto& s = signal(name);
  return s.at(index_at(t));
}

TraceBuilder::TraceBuilder(double step) : step_(step) {
  if (!(step > 0.0)) throw InputError("trace time step must be positive");
}

void TraceBuilder::declare_numeric(const std::string& name) {
  if (ticks_ != 0) throw InputError("signals must be declared before the first tick");
  if (!columns_.emplace(name, Column{SignalType::kNumeric, {}, {}, {}}).second) {
    throw InputError("duplicate signal '" + name + "'");
  }
}

void TraceBuilder::declare_categorical(const std::string& name,
                                       std::vector<std::string> alphabet) {
  if (ticks_ != 0) throw InputError("signals must be declared before the first tick");
  if (!columns_.emplace(name, Column{SignalType::kCategorical, {}, std::move(alphabet), {}})
           .second) {
    throw InputError("duplicate signal '" + name + "'");
  }
}

TraceBuilder::Column& TraceBuilder::column(const std::string& name) {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw InputError("undeclared signal '" + name + "'");
  if (it->second.set_this_tick) throw InputError("signal '" + name + "' set twice in one tick");
  it->second.set_this_tick = true;
  return it->second;
}

void TraceBuilder::set(const std::string& name, double value) {
  auto& col = column(name);
  if (col.type != SignalType::kNumeric) throw InputError("signal '" + name + "' is categorical");
  col.values.push_back(value);
}

void TraceBuilder::set(const std::string& name, std::string_view symbol) {
  auto& col = column(name);
  if (col.type != SignalType::kCategorical) throw InputError("signal '" + name + "' is numeric");
  auto it = std::find(col.alphabet.begin(), col.alphabet.end(), symbol);
  if (it == col.alphabet.end()) {
    throw InputError("signal '" + name + "': '" + std::string(symbol) + "' not in alphabet");
  }
  col.codes.push_back(static_cast<std::uint32_t>(it - col.alphabet.begin()));
}

void TraceBuilder::commit_tick() {
  for (auto& [name, col] : columns_) {
    if (!col.set_this_tick) throw InputError("signal '" + name + "' not set on tick " +
                                             std::to_string(ticks_));
    col.set_this_tick = false;
  }
  ++ticks_;
}

Trace TraceBuilder::finish(TraceMetadata meta) && {
  std::vector<Signal> signals;
  signals.reserve(columns_.size());
  for (auto& [name, col] : columns_) {
    if (col.type == SignalType::kNumeric) {
      signals.push_back(Signal::numeric(name, std::move(col.values)));
    } else {
      signals.push_back(Signal::categorical(name, std::move(col.alphabet), std::move(col.codes)));
    }
  }
  return Trace(step_, std::move(signals), std::move(meta));
}

}  // namespace lawforge::trace
