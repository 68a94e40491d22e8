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

#include "metric_oracles.hpp"

#include <cmath>
#include <cstdlib>

namespace lawforge::testing {

std::vector<double> brute_force_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0.0, equal = 0.0;
    for (double w : v) {
      if (w < v[i]) less += 1.0;
      if (w == v[i]) equal += 1.0;
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

double brute_force_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto rx = brute_force_ranks(x);
  auto ry = brute_force_ranks(y);
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sx += rx[i];
    sy += ry[i];
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
    sxy += rx[i] * ry[i];
  }
  double cov = sxy / n - (sx / n) * (sy / n);
  double vx = sxx / n - (sx / n) * (sx / n);
  double vy = syy / n - (sy / n) * (sy / n);
  return cov / std::sqrt(vx * vy);
}

double brute_force_mae(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::fabs(x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

namespace {

std::size_t g_paths = 0;

void walk(const std::vector<XY>& x, const std::vector<XY>& y, double q, std::size_t i, std::size_t j,
          double cost, double& best) {
  cost += std::pow(std::hypot(x[i].first - y[j].first, x[i].second - y[j].second), q);
  if (i + 1 == x.size() && j + 1 == y.size()) {
    ++g_paths;
    if (cost < best) best = cost;
    return;
  }
  if (i + 1 < x.size()) walk(x, y, q, i + 1, j, cost, best);
  if (j + 1 < y.size()) walk(x, y, q, i, j + 1, cost, best);
  if (i + 1 < x.size() && j + 1 < y.size()) walk(x, y, q, i + 1, j + 1, cost, best);
}

}  // namespace

double exhaustive_dtw(const std::vector<XY>& x, const std::vector<XY>& y, double q) {
  g_paths = 0;
  double best = HUGE_VAL;
  walk(x, y, q, 0, 0, 0.0, best);
  return std::pow(best, 1.0 / q);
}

std::size_t exhaustive_dtw_paths() { return g_paths; }

}  // namespace lawforge::testing
