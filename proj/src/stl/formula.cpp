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
#include <charconv>
#include <cmath>

#include "lawforge/stl.hpp"

namespace lawforge::stl {

struct Formula::Node {
  NodeKind kind = NodeKind::kConstant;
  bool value = false;
  Atom atom;
  std::vector<Formula> children;
  std::optional<Window> window;
};

namespace {

bool is_ordering(Comparator c) {
  return c == Comparator::kGt || c == Comparator::kGe || c == Comparator::kLt ||
         c == Comparator::kLe;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void validate_window(const Window& w) {
  if (!std::isfinite(w.lower) || w.lower < 0.0) {
    throw InputError("window lower bound must be finite and nonnegative");
  }
  if (const double* upper = std::get_if<double>(&w.upper)) {
    if (!std::isfinite(*upper) || *upper < w.lower) {
      throw InputError("window upper bound must be finite and not below the lower bound");
    }
  }
}

}  // namespace

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::kGt: return ">";
    case Comparator::kGe: return ">=";
    case Comparator::kLt: return "<";
    case Comparator::kLe: return "<=";
    case Comparator::kEq: return "=";
    case Comparator::kNe: return "!=";
  }
  return "?";
}

Formula Formula::constant(bool value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kConstant;
  n->value = value;
  return Formula(std::move(n));
}

Formula Formula::atom(Atom a) {
  if (a.signal.empty()) throw InputError("atom needs a signal name");
  if (std::holds_alternative<Symbol>(a.rhs) && is_ordering(a.cmp)) {
    throw InputError("categorical literal '" + std::get<Symbol>(a.rhs).name +
                     "' needs '=' or '!='");
  }
  if (std::holds_alternative<SignalRef>(a.rhs) && !is_ordering(a.cmp)) {
    throw InputError("signal-valued right side needs an ordering comparator");
  }
  if (std::holds_alternative<Budget>(a.rhs) && a.cmp != Comparator::kLe) {
    throw InputError("distance budget atoms use the call form name(budget)");
  }
  if (const double* c = std::get_if<double>(&a.rhs); c && !std::isfinite(*c)) {
    throw InputError("atom constant must be finite");
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kAtom;
  n->atom = std::move(a);
  return Formula(std::move(n));
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kNot;
  n->children.push_back(std::move(f));
  return Formula(std::move(n));
}

Formula Formula::conjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw InputError("conjunction needs at least two operands");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kAnd;
  n->children = std::move(children);
  return Formula(std::move(n));
}

Formula Formula::disjunction(std::vector<Formula> children) {
  if (children.size() < 2) throw InputError("disjunction needs at least two operands");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kOr;
  n->children = std::move(children);
  return Formula(std::move(n));
}

Formula Formula::implication(Formula antecedent, Formula consequent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kImplies;
  n->children = {std::move(antecedent), std::move(consequent)};
  return Formula(std::move(n));
}

Formula Formula::always(Formula f, std::optional<Window> window) {
  if (window) validate_window(*window);
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kAlways;
  n->children.push_back(std::move(f));
  n->window = std::move(window);
  return Formula(std::move(n));
}

Formula Formula::eventually(Formula f, std::optional<Window> window) {
  if (window) validate_window(*window);
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::kEventually;
  n->children.push_back(std::move(f));
  n->window = std::move(window);
  return Formula(std::move(n));
}

NodeKind Formula::kind() const noexcept { return node_->kind; }

bool Formula::constant_value() const {
  if (node_->kind != NodeKind::kConstant) throw std::logic_error("not a constant node");
  return node_->value;
}

const Atom& Formula::atom() const {
  if (node_->kind != NodeKind::kAtom) throw std::logic_error("not an atomic node");
  return node_->atom;
}

const std::vector<Formula>& Formula::children() const noexcept { return node_->children; }
const std::optional<Window>& Formula::window() const noexcept { return node_->window; }

std::size_t Formula::depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::kConstant: return x.value == y.value;
    case NodeKind::kAtom: return x.atom == y.atom;
    default: return x.window == y.window && x.children == y.children;
  }
}

namespace {

bool is_binary(const Formula& f) {
  auto k = f.kind();
  return k == NodeKind::kAnd || k == NodeKind::kOr || k == NodeKind::kImplies;
}

void print(const Formula& f, std::string& out);

void print_wrapped(const Formula& f, std::string& out, bool always_wrap) {
  bool wrap = always_wrap ? f.kind() != NodeKind::kConstant : is_binary(f);
  if (wrap) out += '(';
  print(f, out);
  if (wrap) out += ')';
}

void print_operand(const Operand& rhs, std::string& out) {
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          out += format_number(v);
        } else {
          out += v.name;
        }
      },
      rhs);
}

void print(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case NodeKind::kConstant:
      out += f.constant_value() ? "true" : "false";
      return;
    case NodeKind::kAtom: {
      const auto& a = f.atom();
      if (const auto* b = std::get_if<Budget>(&a.rhs)) {
        out += a.signal + "(" + b->name + ")";
        return;
      }
      out += a.signal;
      out += ' ';
      out += to_string(a.cmp);
      out += ' ';
      print_operand(a.rhs, out);
      return;
    }
    case NodeKind::kNot:
      out += "not ";
      print_wrapped(f.children()[0], out, true);
      return;
    case NodeKind::kAnd:
    case NodeKind::kOr: {
      const char* sep = f.kind() == NodeKind::kAnd ? " and " : " or ";
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += sep;
        first = false;
        print_wrapped(c, out, false);
      }
      return;
    }
    case NodeKind::kImplies:
      print_wrapped(f.children()[0], out, false);
      out += " implies ";
      print_wrapped(f.children()[1], out, false);
      return;
    case NodeKind::kAlways:
    case NodeKind::kEventually: {
      out += f.kind() == NodeKind::kAlways ? "G" : "F";
      if (const auto& w = f.window()) {
        out += "[" + format_number(w->lower) + ", ";
        if (const double* u = std::get_if<double>(&w->upper)) {
          out += format_number(*u);
        } else {
          out += std::get<Budget>(w->upper).name;
        }
        out += "]";
      }
      out += ' ';
      print_wrapped(f.children()[0], out, true);
      return;
    }
  }
}

void collect(const Formula& f, std::set<std::string>& refs, std::set<std::string>& budgets,
             bool* window_budget = nullptr) {
  if (f.kind() == NodeKind::kAtom) {
    const auto& a = f.atom();
    refs.insert(a.signal);
    if (const auto* s = std::get_if<SignalRef>(&a.rhs)) refs.insert(s->name);
    if (const auto* b = std::get_if<Budget>(&a.rhs)) budgets.insert(b->name);
    return;
  }
  if (const auto& w = f.window()) {
    if (const auto* b = std::get_if<Budget>(&w->upper)) {
      budgets.insert(b->name);
      if (window_budget) *window_budget = true;
    }
  }
  for (const auto& c : f.children()) collect(c, refs, budgets, window_budget);
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  print(f, out);
  return out;
}

std::set<std::string> referenced_signals(const Formula& f) {
  std::set<std::string> refs, budgets;
  collect(f, refs, budgets);
  return refs;
}

std::set<std::string> budget_signals(const Formula& f) {
  std::set<std::string> refs, budgets;
  collect(f, refs, budgets);
  return budgets;
}

std::set<std::string> required_signals(const Formula& f, std::string_view speed_signal) {
  std::set<std::string> refs, budgets;
  bool window_budget = false;
  collect(f, refs, budgets, &window_budget);
  if (window_budget) refs.emplace(speed_signal);
  refs.insert(budgets.begin(), budgets.end());
  return refs;
}

}  // namespace lawforge::stl
