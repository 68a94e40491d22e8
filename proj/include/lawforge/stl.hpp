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

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "lawforge/error.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::stl {

enum class Comparator { kGt, kGe, kLt, kLe, kEq, kNe };

std::string_view to_string(Comparator cmp);

// Right-hand side of an atomic comparison.
struct SignalRef {
  std::string name;
  friend bool operator==(const SignalRef&, const SignalRef&) = default;
};
// Categorical literal, e.g. `red` in `color = red`.
struct Symbol {
  std::string name;
  friend bool operator==(const Symbol&, const Symbol&) = default;
};
// Distance budget read from a trace signal. Used by call-form atoms such as
// `stopline_ahead(length)` and by distance windows `F[0, length]`.
struct Budget {
  std::string name;
  friend bool operator==(const Budget&, const Budget&) = default;
};

using Operand = std::variant<double, SignalRef, Symbol, Budget>;

struct Atom {
  std::string signal;
  Comparator cmp = Comparator::kGt;
  Operand rhs = 0.0;
  friend bool operator==(const Atom&, const Atom&) = default;
};

// Temporal window [lower, upper]. A numeric upper bound is in seconds; a
// Budget upper bound is a distance converted to time using the ego speed at
// the evaluation instant.
struct Window {
  double lower = 0.0;
  std::variant<double, Budget> upper = 0.0;
  friend bool operator==(const Window&, const Window&) = default;
};

enum class NodeKind { kConstant, kAtom, kNot, kAnd, kOr, kImplies, kAlways, kEventually };

class Formula {
 public:
  static Formula constant(bool value);
  static Formula atom(Atom a);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);
  static Formula implication(Formula antecedent, Formula consequent);
  static Formula always(Formula f, std::optional<Window> window = std::nullopt);
  static Formula eventually(Formula f, std::optional<Window> window = std::nullopt);

  NodeKind kind() const noexcept;
  bool constant_value() const;
  const Atom& atom() const;
  const std::vector<Formula>& children() const noexcept;
  const std::optional<Window>& window() const noexcept;

  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// Raised for malformed formula text; carries the 1-based source position.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Raised when a formula cannot be evaluated on a trace: missing signal,
// type mismatch, or a window lying entirely past the end of the trace.
class EvaluationError : public InputError {
 public:
  using InputError::InputError;
};

Formula parse_formula(std::string_view text);
std::string to_string(const Formula& f);

// Signal names appearing in atomic nodes (left sides and signal-valued right
// sides). Budget operands and window bounds are not included.
std::set<std::string> referenced_signals(const Formula& f);
// Distance-budget signals used by call-form atoms and windows.
std::set<std::string> budget_signals(const Formula& f);
// Every signal a trace must provide to evaluate `f`.
std::set<std::string> required_signals(const Formula& f, std::string_view speed_signal = "real_speed");

struct MonitorOptions {
  // Robustness magnitude for categorical (in)equality atoms.
  double kappa = 1.0;
  // Ego speed used to turn distance budgets into time windows.
  std::string speed_signal = "real_speed";
};

// Quantitative robustness at time t.
double robustness(const Formula& f, const trace::Trace& trace, double t,
                  const MonitorOptions& opts = {});

// Robustness at every sample index. Instants where the value is undefined
// (a window falls entirely past the trace end) hold NaN.
std::vector<double> robustness_signal(const Formula& f, const trace::Trace& trace,
                                      const MonitorOptions& opts = {});

}  // namespace lawforge::stl
