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

// Element-by-element reference for the attention model forward pass. Reads
// the model's parameter tensors but recomputes everything with scalar loops.

#include <vector>

#include "lawforge/generator.hpp"

namespace lawforge::testing {

// Row t: log p(. | ids[0..t]).
std::vector<std::vector<double>> naive_log_probs(const gen::AttentionModel& model,
                                                 const std::vector<int>& ids);

// Plain scaled dot-product attention of one head: softmax(q k^T / sqrt(dk)) v
// with a causal mask, for row-major inputs of shape T x dk.
std::vector<std::vector<double>> single_head_attention(const std::vector<std::vector<double>>& q,
                                                       const std::vector<std::vector<double>>& k,
                                                       const std::vector<std::vector<double>>& v);

}  // namespace lawforge::testing
