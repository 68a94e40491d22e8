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

#include "oracles.hpp"

#include <cmath>
#include <functional>
#include <limits>

namespace lawforge::testing {

namespace {

using stl::Comparator;
using stl::Formula;
using stl::NodeKind;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Inclusive set of sample indices in the window opened at index k; empty if
// no sample lies in it.
std::vector<std::size_t> window_members(const Formula& f, const trace::Trace& tr, std::size_t k,
                                        const std::string& speed_signal) {
  const std::size_t n = tr.length();
  const double step = tr.step();
  const double tk = static_cast<double>(k) * step;
  double lo = tk, hi = kInf;
  if (const auto& w = f.window()) {
    lo = tk + w->lower;
    if (const double* u = std::get_if<double>(&w->upper)) {
      hi = tk + *u;
    } else {
      const auto& b = std::get<stl::Budget>(w->upper);
      const double dist = std::max(0.0, tr.signal(b.name).values()[k]);
      const double v = tr.signal(speed_signal).values()[k];
      hi = v > 0.0 ? tk + std::max(step, dist / v) : kInf;
    }
  }
  std::vector<std::size_t> members;
  const double eps = 1e-9 * step;
  for (std::size_t j = 0; j < n; ++j) {
    const double tj = static_cast<double>(j) * step;
    if (tj + eps >= lo && tj <= hi + eps) members.push_back(j);
  }
  return members;
}

double atom_value(const stl::Atom& a, const trace::Trace& tr, std::size_t i, double kappa) {
  const auto& s = tr.signal(a.signal);
  if (!s.is_numeric()) {
    const auto& sym = std::get<stl::Symbol>(a.rhs).name;
    const bool equal = s.alphabet()[s.codes()[i]] == sym;
    const bool want = a.cmp == Comparator::kEq;
    return equal == want ? kappa : -kappa;
  }
  const double x = s.values()[i];
  double c = 0;
  if (const double* d = std::get_if<double>(&a.rhs)) {
    c = *d;
  } else if (const auto* r = std::get_if<stl::SignalRef>(&a.rhs)) {
    c = tr.signal(r->name).values()[i];
  } else {
    c = tr.signal(std::get<stl::Budget>(a.rhs).name).values()[i];
  }
  switch (a.cmp) {
    case Comparator::kGt:
    case Comparator::kGe: return x - c;
    case Comparator::kLt:
    case Comparator::kLe: return c - x;
    case Comparator::kEq: return -std::abs(x - c);
    case Comparator::kNe: return std::abs(x - c);
  }
  return kNaN;
}

bool atom_truth(const stl::Atom& a, const trace::Trace& tr, std::size_t i) {
  const auto& s = tr.signal(a.signal);
  if (!s.is_numeric()) {
    const bool equal = s.alphabet()[s.codes()[i]] == std::get<stl::Symbol>(a.rhs).name;
    return a.cmp == Comparator::kEq ? equal : !equal;
  }
  const double x = s.values()[i];
  double c = 0;
  if (const double* d = std::get_if<double>(&a.rhs)) {
    c = *d;
  } else if (const auto* r = std::get_if<stl::SignalRef>(&a.rhs)) {
    c = tr.signal(r->name).values()[i];
  } else {
    c = tr.signal(std::get<stl::Budget>(a.rhs).name).values()[i];
  }
  switch (a.cmp) {
    case Comparator::kGt: return x > c;
    case Comparator::kGe: return x >= c;
    case Comparator::kLt: return x < c;
    case Comparator::kLe: return x <= c;
    case Comparator::kEq: return x == c;
    case Comparator::kNe: return x != c;
  }
  return false;
}

}  // namespace

std::vector<double> brute_force_robustness(const Formula& f, const trace::Trace& tr,
                                           double kappa, const std::string& speed_signal) {
  const std::size_t n = tr.length();
  std::vector<double> out(n, kNaN);
  switch (f.kind()) {
    case NodeKind::kConstant:
      for (auto& v : out) v = f.constant_value() ? kInf : -kInf;
      return out;
    case NodeKind::kAtom:
      for (std::size_t i = 0; i < n; ++i) out[i] = atom_value(f.atom(), tr, i, kappa);
      return out;
    case NodeKind::kNot: {
      auto c = brute_force_robustness(f.children()[0], tr, kappa, speed_signal);
      for (std::size_t i = 0; i < n; ++i) out[i] = -c[i];
      return out;
    }
    case NodeKind::kAnd:
    case NodeKind::kOr:
    case NodeKind::kImplies: {
      std::vector<std::vector<double>> kids;
      for (const auto& c : f.children()) kids.push_back(brute_force_robustness(c, tr, kappa, speed_signal));
      if (f.kind() == NodeKind::kImplies) {
        for (auto& v : kids[0]) v = -v;
      }
      const bool take_min = f.kind() == NodeKind::kAnd;
      for (std::size_t i = 0; i < n; ++i) {
        double acc = take_min ? kInf : -kInf;
        bool undefined = false;
        for (const auto& k : kids) {
          if (std::isnan(k[i])) undefined = true;
          acc = take_min ? (k[i] < acc ? k[i] : acc) : (k[i] > acc ? k[i] : acc);
        }
        out[i] = undefined ? kNaN : acc;
      }
      return out;
    }
    case NodeKind::kAlways:
    case NodeKind::kEventually: {
      auto c = brute_force_robustness(f.children()[0], tr, kappa, speed_signal);
      const bool take_min = f.kind() == NodeKind::kAlways;
      for (std::size_t k = 0; k < n; ++k) {
        auto members = window_members(f, tr, k, speed_signal);
        if (members.empty()) continue;
        double acc = take_min ? kInf : -kInf;
        bool undefined = false;
        for (auto j : members) {
          if (std::isnan(c[j])) undefined = true;
          acc = take_min ? (c[j] < acc ? c[j] : acc) : (c[j] > acc ? c[j] : acc);
        }
        out[k] = undefined ? kNaN : acc;
      }
      return out;
    }
  }
  return out;
}

std::vector<std::optional<bool>> boolean_satisfaction(const Formula& f, const trace::Trace& tr,
                                                      const std::string& speed_signal) {
  const std::size_t n = tr.length();
  std::vector<std::optional<bool>> out(n);
  switch (f.kind()) {
    case NodeKind::kConstant:
      for (auto& v : out) v = f.constant_value();
      return out;
    case NodeKind::kAtom:
      for (std::size_t i = 0; i < n; ++i) out[i] = atom_truth(f.atom(), tr, i);
      return out;
    case NodeKind::kNot: {
      auto c = boolean_satisfaction(f.children()[0], tr, speed_signal);
      for (std::size_t i = 0; i < n; ++i) {
        if (c[i]) out[i] = !*c[i];
      }
      return out;
    }
    case NodeKind::kAnd:
    case NodeKind::kOr: {
      std::vector<std::vector<std::optional<bool>>> kids;
      for (const auto& c : f.children()) kids.push_back(boolean_satisfaction(c, tr, speed_signal));
      const bool is_and = f.kind() == NodeKind::kAnd;
      for (std::size_t i = 0; i < n; ++i) {
        bool acc = is_and;
        bool undefined = false;
        for (const auto& k : kids) {
          if (!k[i]) {
            undefined = true;
            break;
          }
          acc = is_and ? (acc && *k[i]) : (acc || *k[i]);
        }
        if (!undefined) out[i] = acc;
      }
      return out;
    }
    case NodeKind::kImplies: {
      auto a = boolean_satisfaction(f.children()[0], tr, speed_signal);
      auto b = boolean_satisfaction(f.children()[1], tr, speed_signal);
      for (std::size_t i = 0; i < n; ++i) {
        if (a[i] && b[i]) out[i] = !*a[i] || *b[i];
      }
      return out;
    }
    case NodeKind::kAlways:
    case NodeKind::kEventually: {
      auto c = boolean_satisfaction(f.children()[0], tr, speed_signal);
      const bool forall = f.kind() == NodeKind::kAlways;
      for (std::size_t k = 0; k < n; ++k) {
        auto members = window_members(f, tr, k, speed_signal);
        if (members.empty()) continue;
        bool acc = forall;
        bool undefined = false;
        for (auto j : members) {
          if (!c[j]) {
            undefined = true;
            break;
          }
          acc = forall ? (acc && *c[j]) : (acc || *c[j]);
        }
        if (!undefined) out[k] = acc;
      }
      return out;
    }
  }
  return out;
}

trace::Trace random_trace(std::mt19937_64& rng, std::size_t length, double step) {
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_real_distribution<double> speed(0.0, 12.0);
  std::uniform_real_distribution<double> budget(0.0, 20.0);
  std::uniform_int_distribution<std::uint32_t> color(0, 2), flag(0, 1);
  std::vector<double> x(length), y(length), z(length), v(length), len(length);
  std::vector<std::uint32_t> c(length), b(length);
  // Random walks so temporal structure is non-trivial.
  double xs = normal(rng), ys = normal(rng), zs = normal(rng);
  for (std::size_t i = 0; i < length; ++i) {
    xs += 0.5 * normal(rng);
    ys += 0.5 * normal(rng);
    zs = normal(rng);
    x[i] = xs;
    y[i] = ys;
    z[i] = zs;
    v[i] = (i % 17 == 3) ? 0.0 : speed(rng);
    len[i] = budget(rng);
    c[i] = color(rng);
    b[i] = flag(rng);
  }
  std::vector<trace::Signal> sigs;
  sigs.push_back(trace::Signal::numeric("x", std::move(x)));
  sigs.push_back(trace::Signal::numeric("y", std::move(y)));
  sigs.push_back(trace::Signal::numeric("z", std::move(z)));
  sigs.push_back(trace::Signal::numeric("real_speed", std::move(v)));
  sigs.push_back(trace::Signal::numeric("len", std::move(len)));
  sigs.push_back(trace::Signal::categorical("color", {"red", "yellow", "green"}, std::move(c)));
  sigs.push_back(trace::Signal::categorical("flag", {"false", "true"}, std::move(b)));
  return trace::Trace(step, std::move(sigs));
}

stl::Formula random_formula(std::mt19937_64& rng, std::size_t max_depth) {
  std::uniform_int_distribution<int> pick(0, 99);
  std::uniform_real_distribution<double> thresh(-6.0, 6.0);
  auto leaf = [&]() -> Formula {
    int r = pick(rng);
    static const char* numeric[] = {"x", "y", "z", "real_speed"};
    if (r < 2) return Formula::constant(r == 0);
    if (r < 15) {
      static const char* colors[] = {"red", "yellow", "green", "blue"};
      return Formula::atom({"color", r % 2 ? Comparator::kEq : Comparator::kNe,
                            stl::Symbol{colors[r % 4]}});
    }
    if (r < 22) return Formula::atom({"flag", Comparator::kEq, stl::Symbol{"true"}});
    if (r < 28) return Formula::atom({"len", Comparator::kLe, stl::Budget{"len"}});
    static const Comparator cmps[] = {Comparator::kGt, Comparator::kGe, Comparator::kLt,
                                      Comparator::kLe};
    const char* lhs = numeric[r % 4];
    if (r < 38) return Formula::atom({lhs, cmps[r % 4], stl::SignalRef{numeric[(r + 1) % 4]}});
    return Formula::atom({lhs, cmps[r % 4], thresh(rng)});
  };
  std::function<Formula(std::size_t)> gen = [&](std::size_t depth) -> Formula {
    if (depth <= 1 || pick(rng) < 20) return leaf();
    int r = pick(rng);
    if (r < 12) return Formula::negation(gen(depth - 1));
    if (r < 30) return Formula::conjunction({gen(depth - 1), gen(depth - 1)});
    if (r < 48) return Formula::disjunction({gen(depth - 1), gen(depth - 1)});
    if (r < 58) return Formula::implication(gen(depth - 1), gen(depth - 1));
    std::optional<stl::Window> w;
    int wr = pick(rng);
    if (wr < 60) {
      std::uniform_real_distribution<double> lo(0.0, 1.5), span(0.0, 3.0);
      double a = std::round(lo(rng) * 100.0) / 100.0;
      w = stl::Window{a, a + std::round(span(rng) * 100.0) / 100.0};
    } else if (wr < 75) {
      w = stl::Window{0.0, stl::Budget{"len"}};
    }
    return r < 79 ? Formula::always(gen(depth - 1), w) : Formula::eventually(gen(depth - 1), w);
  };
  return gen(max_depth);
}

OracleReward brute_force_reward(const trace::Trace& tr,
                                const std::vector<std::pair<stl::Formula, double>>& laws) {
  OracleReward out;
  for (std::size_t k = 0; k < laws.size(); ++k) {
    auto rho = brute_force_robustness(laws[k].first, tr);
    double lo = rho.at(0);
    for (double r : rho) {
      if (!std::isnan(r) && r < lo) lo = r;
    }
    out.min_robustness.push_back(lo);
    double w = laws[k].second;
    double score = (lo < 0.0 && w > 0.0) ? -lo * w : 0.0;
    if (score > out.overall) {
      out.overall = score;
      out.attributed = static_cast<int>(k);
    }
  }
  return out;
}

}  // namespace lawforge::testing
