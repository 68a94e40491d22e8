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

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "lawforge/stl.hpp"

namespace lawforge::stl {

struct LawSpec {
  std::string id;
  std::string article;
  std::string description;
  Formula formula = Formula::constant(true);
  // Demerit points from the penalty regulation, 0 if none. Passed to risk
  // scorers as grounding.
  int penalty_points = 0;
  // Road structures the law applies to; empty means all.
  std::set<std::string> roads;

  bool applies_to(std::string_view road) const {
    return roads.empty() || roads.count(std::string(road)) > 0;
  }
};

class LawCorpus {
 public:
  LawCorpus() = default;
  explicit LawCorpus(std::vector<LawSpec> laws);

  const std::vector<LawSpec>& laws() const noexcept { return laws_; }
  std::size_t size() const noexcept { return laws_.size(); }
  const LawSpec& at(std::string_view id) const;
  bool contains(std::string_view id) const;

  // Union of required_signals over every law.
  std::set<std::string> required_signals(std::string_view speed_signal = "real_speed") const;

 private:
  std::vector<LawSpec> laws_;
};

// Corpus document format is described in docs/law_corpus.md.
LawCorpus load_corpus(const std::filesystem::path& path);
LawCorpus parse_corpus(std::string_view json_text);

}  // namespace lawforge::stl
