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
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "lawforge/analytics.hpp"

namespace lawforge::analytics {

namespace {

struct SpanLess {
  bool operator()(std::span<const std::string> a, std::span<const std::string> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

using NgramCounts = std::map<std::span<const std::string>, std::size_t, SpanLess>;

NgramCounts count_ngrams(const Sentence& s, std::size_t n) {
  NgramCounts out;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++out[std::span<const std::string>(s).subspan(i, n)];
  return out;
}

void require_nonempty(std::span<const Sentence> sentences, const char* what) {
  if (sentences.empty()) throw InputError(std::string(what) + ": empty sentence set");
}

}  // namespace

double dtw(std::span<const Point> x, std::span<const Point> y, double q) {
  if (x.empty() || y.empty()) throw InputError("dtw: empty sequence");
  if (!(q >= 1.0) || !std::isfinite(q)) throw ConfigError("dtw: order must be a finite value >= 1");
  const double inf = std::numeric_limits<double>::infinity();
  const std::size_t m = y.size();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (const Point& a : x) {
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) throw InputError("dtw: non-finite coordinate");
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const Point& b = y[j - 1];
      const double d = std::hypot(a.x - b.x, a.y - b.y);
      const double c = q == 1.0 ? d : std::pow(d, q);
      cur[j] = c + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  const double total = prev[m];
  if (!std::isfinite(total)) throw InputError("dtw: non-finite coordinate");
  return q == 1.0 ? total : std::pow(total, 1.0 / q);
}

double distinct_n(std::span<const Sentence> sentences, std::size_t n) {
  if (n == 0) throw ConfigError("distinct_n: n must be positive");
  std::set<std::vector<std::string>> unique;
  std::size_t total = 0;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      unique.emplace(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(i + n));
      ++total;
    }
  }
  if (total == 0) throw InputError("distinct_n: every sentence is shorter than n");
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

double sentence_bleu(const Sentence& hyp, std::span<const Sentence* const> refs, const BleuOptions& opts) {
  if (opts.max_order == 0) throw ConfigError("bleu: max_order must be positive");
  if (refs.empty()) throw InputError("bleu: no references");
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= opts.max_order; ++n) {
    const NgramCounts h = count_ngrams(hyp, n);
    NgramCounts clip;
    for (const Sentence* r : refs) {
      for (const auto& [g, c] : count_ngrams(*r, n)) {
        if (!h.count(g)) continue;
        auto& slot = clip[g];
        slot = std::max(slot, c);
      }
    }
    std::size_t matched = 0, total = 0;
    for (const auto& [g, c] : h) {
      total += c;
      if (auto it = clip.find(g); it != clip.end()) matched += std::min(c, it->second);
    }
    double p;
    if (n == 1) {
      if (matched == 0) return 0.0;
      p = static_cast<double>(matched) / static_cast<double>(total);
    } else {
      p = static_cast<double>(matched + 1) / static_cast<double>(total + 1);
    }
    log_sum += std::log(p);
  }
  const double c = static_cast<double>(hyp.size());
  double r = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const Sentence* ref : refs) {
    const double len = static_cast<double>(ref->size());
    const double gap = std::abs(len - c);
    if (gap < best || (gap == best && len < r)) {
      best = gap;
      r = len;
    }
  }
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / static_cast<double>(opts.max_order));
}

double self_bleu(std::span<const Sentence> sentences, const BleuOptions& opts) {
  if (sentences.size() < 2) throw InputError("self_bleu: needs at least two sentences");
  std::vector<const Sentence*> refs;
  double sum = 0.0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    refs.clear();
    for (std::size_t j = 0; j < sentences.size(); ++j) {
      if (j != i) refs.push_back(&sentences[j]);
    }
    sum += sentence_bleu(sentences[i], refs, opts);
  }
  return sum / static_cast<double>(sentences.size());
}

double entropy(std::span<const Sentence> sentences) {
  require_nonempty(sentences, "entropy");
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      ++counts[t];
      ++total;
    }
  }
  if (total == 0) throw InputError("entropy: no tokens");
  double h = 0.0;
  for (const auto& [t, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

double coverage(std::span<const Sentence> sentences, std::span<const std::string> core) {
  require_nonempty(sentences, "coverage");
  const std::set<std::string> wanted(core.begin(), core.end());
  if (wanted.empty()) throw InputError("coverage: empty core vocabulary");
  std::set<std::string> used;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (wanted.count(t)) used.insert(t);
    }
  }
  return static_cast<double>(used.size()) / static_cast<double>(wanted.size());
}

double percentile(std::vector<double> data, double p) {
  if (data.empty()) throw InputError("percentile: empty data");
  if (!(p >= 0.0 && p <= 100.0)) throw ConfigError("percentile: p must lie in [0, 100]");
  std::sort(data.begin(), data.end());
  const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(data.size())));
  return data[std::max<std::size_t>(rank, 1) - 1];
}

std::array<double, 5> quartiles(std::vector<double> data) {
  std::array<double, 5> out{};
  const double ps[5] = {0, 25, 50, 75, 100};
  for (int i = 0; i < 5; ++i) out[i] = percentile(data, ps[i]);
  return out;
}

}  // namespace lawforge::analytics
