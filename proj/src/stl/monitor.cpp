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

// Offline quantitative monitor. Each node is evaluated to a full robustness
// signal over all sample indices, bottom-up; temporal windows use a sparse
// table for O(1) range extrema.

#include <algorithm>
#include <cmath>
#include <limits>

#include "lawforge/stl.hpp"

namespace lawforge::stl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Slack when turning window bounds in seconds into sample offsets.
constexpr double kIndexSlack = 1e-9;

using Values = std::vector<double>;

class RangeExtremum {
 public:
  RangeExtremum(const Values& v, bool take_min) : take_min_(take_min) {
    const std::size_t n = v.size();
    undefined_prefix_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      undefined_prefix_[i + 1] = undefined_prefix_[i] + (std::isnan(v[i]) ? 1 : 0);
    }
    table_.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i) {
      table_[0][i] = std::isnan(v[i]) ? (take_min ? kInf : -kInf) : v[i];
    }
    for (std::size_t k = 1; (std::size_t{1} << k) <= n; ++k) {
      const std::size_t half = std::size_t{1} << (k - 1);
      const auto& prev = table_[k - 1];
      Values row(n - (std::size_t{1} << k) + 1);
      for (std::size_t i = 0; i < row.size(); ++i) row[i] = pick(prev[i], prev[i + half]);
      table_.push_back(std::move(row));
    }
  }

  // Extremum over the inclusive index range [lo, hi]; NaN if any sample in
  // the range is undefined.
  double query(std::size_t lo, std::size_t hi) const {
    if (undefined_prefix_[hi + 1] != undefined_prefix_[lo]) return kNaN;
    const std::size_t len = hi - lo + 1;
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= len) ++k;
    return pick(table_[k][lo], table_[k][hi + 1 - (std::size_t{1} << k)]);
  }

 private:
  double pick(double a, double b) const { return take_min_ ? std::min(a, b) : std::max(a, b); }

  bool take_min_;
  std::vector<std::size_t> undefined_prefix_;
  std::vector<Values> table_;
};

const trace::Signal& lookup(const trace::Trace& tr, const std::string& name) {
  if (!tr.has(name)) throw EvaluationError("missing signal '" + name + "' in trace");
  return tr.signal(name);
}

const trace::Signal& numeric_signal(const trace::Trace& tr, const std::string& name,
                                    const char* role) {
  const auto& s = lookup(tr, name);
  if (!s.is_numeric()) {
    throw EvaluationError(std::string(role) + " signal '" + name + "' must be numeric");
  }
  return s;
}

class Evaluator {
 public:
  Evaluator(const trace::Trace& tr, const MonitorOptions& opts) : tr_(tr), opts_(opts) {}

  Values eval(const Formula& f) {
    const std::size_t n = tr_.length();
    switch (f.kind()) {
      case NodeKind::kConstant:
        return Values(n, f.constant_value() ? kInf : -kInf);
      case NodeKind::kAtom:
        return atom(f.atom());
      case NodeKind::kNot: {
        Values v = eval(f.children()[0]);
        for (auto& x : v) x = -x;
        return v;
      }
      case NodeKind::kAnd:
      case NodeKind::kOr: {
        const bool is_and = f.kind() == NodeKind::kAnd;
        Values acc = eval(f.children()[0]);
        for (std::size_t c = 1; c < f.children().size(); ++c) {
          Values v = eval(f.children()[c]);
          for (std::size_t i = 0; i < n; ++i) acc[i] = combine(acc[i], v[i], is_and);
        }
        return acc;
      }
      case NodeKind::kImplies: {
        Values a = eval(f.children()[0]);
        Values b = eval(f.children()[1]);
        for (std::size_t i = 0; i < n; ++i) a[i] = combine(-a[i], b[i], false);
        return a;
      }
      case NodeKind::kAlways:
      case NodeKind::kEventually:
        return temporal(f);
    }
    return {};
  }

 private:
  static double combine(double a, double b, bool take_min) {
    if (std::isnan(a) || std::isnan(b)) return kNaN;
    return take_min ? std::min(a, b) : std::max(a, b);
  }

  Values atom(const Atom& a) {
    const auto& lhs = lookup(tr_, a.signal);
    const std::size_t n = tr_.length();
    Values out(n);
    if (!lhs.is_numeric()) {
      const auto* sym = std::get_if<Symbol>(&a.rhs);
      if (!sym) {
        throw EvaluationError("categorical signal '" + a.signal +
                              "' can only be compared with '=' or '!=' against a literal");
      }
      const auto code = lhs.code_of(sym->name);
      const bool want_equal = a.cmp == Comparator::kEq;
      const auto codes = lhs.codes();
      for (std::size_t i = 0; i < n; ++i) {
        const bool equal = code && codes[i] == *code;
        out[i] = (equal == want_equal) ? opts_.kappa : -opts_.kappa;
      }
      return out;
    }
    if (std::holds_alternative<Symbol>(a.rhs)) {
      throw EvaluationError("numeric signal '" + a.signal + "' compared with literal '" +
                            std::get<Symbol>(a.rhs).name + "'");
    }
    const auto x = lhs.values();
    std::span<const double> rhs_values;
    double rhs_const = 0.0;
    if (const double* c = std::get_if<double>(&a.rhs)) {
      rhs_const = *c;
    } else if (const auto* s = std::get_if<SignalRef>(&a.rhs)) {
      rhs_values = numeric_signal(tr_, s->name, "right-hand").values();
    } else {
      rhs_values = numeric_signal(tr_, std::get<Budget>(a.rhs).name, "budget").values();
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double c = rhs_values.empty() ? rhs_const : rhs_values[i];
      switch (a.cmp) {
        case Comparator::kGt:
        case Comparator::kGe: out[i] = x[i] - c; break;
        case Comparator::kLt:
        case Comparator::kLe: out[i] = c - x[i]; break;
        case Comparator::kEq: out[i] = -std::abs(x[i] - c); break;
        case Comparator::kNe: out[i] = std::abs(x[i] - c); break;
      }
    }
    return out;
  }

  Values temporal(const Formula& f) {
    const bool take_min = f.kind() == NodeKind::kAlways;
    const Values child = eval(f.children()[0]);
    const std::size_t n = tr_.length();
    Values out(n, kNaN);
    if (n == 0) return out;
    RangeExtremum rmq(child, take_min);
    const double step = tr_.step();
    const auto& w = f.window();

    if (!w) {
      for (std::size_t k = 0; k < n; ++k) out[k] = rmq.query(k, n - 1);
      return out;
    }

    const auto lo_off = static_cast<std::size_t>(std::ceil(w->lower / step - kIndexSlack));
    if (const double* upper = std::get_if<double>(&w->upper)) {
      const double hi_raw = std::floor(*upper / step + kIndexSlack);
      for (std::size_t k = 0; k < n; ++k) {
        const std::size_t lo = k + lo_off;
        if (lo >= n || hi_raw < static_cast<double>(lo_off)) continue;
        const double hi_d = static_cast<double>(k) + hi_raw;
        const std::size_t hi = hi_d >= static_cast<double>(n - 1) ? n - 1
                                                                  : static_cast<std::size_t>(hi_d);
        out[k] = rmq.query(lo, hi);
      }
      return out;
    }

    // Distance budget: the window spans the time needed to cover the budget
    // at the current ego speed, at least one step.
    const auto& budget = numeric_signal(tr_, std::get<Budget>(w->upper).name, "budget").values();
    const auto& speed = numeric_signal(tr_, opts_.speed_signal, "speed").values();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t lo = k + lo_off;
      if (lo >= n) continue;
      const double v = speed[k];
      const double dist = std::max(0.0, budget[k]);
      const double span = v > 0.0 ? std::max(step, dist / v) : kInf;
      const double hi_raw = std::floor(span / step + kIndexSlack);
      if (hi_raw < static_cast<double>(lo_off)) continue;
      const double hi_d = static_cast<double>(k) + hi_raw;
      const std::size_t hi =
          hi_d >= static_cast<double>(n - 1) ? n - 1 : static_cast<std::size_t>(hi_d);
      out[k] = rmq.query(lo, hi);
    }
    return out;
  }

  const trace::Trace& tr_;
  const MonitorOptions& opts_;
};

}  // namespace

std::vector<double> robustness_signal(const Formula& f, const trace::Trace& trace,
                                      const MonitorOptions& opts) {
  return Evaluator(trace, opts).eval(f);
}

double robustness(const Formula& f, const trace::Trace& trace, double t,
                  const MonitorOptions& opts) {
  std::size_t k = 0;
  try {
    k = trace.index_at(t);
  } catch (const InputError& e) {
    throw EvaluationError(e.what());
  }
  const auto values = robustness_signal(f, trace, opts);
  if (std::isnan(values[k])) {
    throw EvaluationError("empty evaluation window at t = " + std::to_string(t) +
                          ": window lies past the end of the trace");
  }
  return values[k];
}

}  // namespace lawforge::stl
