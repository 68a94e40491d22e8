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

// Independent reference implementations used only by tests. Nothing here may
// call into the code paths it is checking.

#include <optional>
#include <random>
#include <vector>

#include "lawforge/stl.hpp"
#include "lawforge/trace.hpp"

namespace lawforge::testing {

// Robustness at every sample index, computed by exhaustive iteration over all
// samples for every window. NaN marks undefined instants.
std::vector<double> brute_force_robustness(const stl::Formula& f, const trace::Trace& tr,
                                           double kappa = 1.0,
                                           const std::string& speed_signal = "real_speed");

// Boolean satisfaction at every sample index; nullopt where undefined.
std::vector<std::optional<bool>> boolean_satisfaction(
    const stl::Formula& f, const trace::Trace& tr,
    const std::string& speed_signal = "real_speed");

// Random trace over numeric signals x, y, z, real_speed, len and
// categorical signals color {red, yellow, green} and flag {false, true}.
trace::Trace random_trace(std::mt19937_64& rng, std::size_t length, double step = 0.1);

// Random formula over the signals of random_trace with depth <= max_depth.
stl::Formula random_formula(std::mt19937_64& rng, std::size_t max_depth);

// Scenario reward recomputed from brute_force_robustness: per law the most
// violating defined instant, weighted, then the largest weighted violation.
struct OracleReward {
  double overall = 0.0;
  int attributed = -1;  // index into `laws`, -1 when nothing is violated
  std::vector<double> min_robustness;
};
OracleReward brute_force_reward(const trace::Trace& tr,
                                const std::vector<std::pair<stl::Formula, double>>& laws);

}  // namespace lawforge::testing
