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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lawforge/error.hpp"

namespace lawforge::gen {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Token ids shared with the codec vocabulary.
constexpr int kPad = 0;
constexpr int kBos = 1;
constexpr int kEos = 2;

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 128;
  std::size_t heads = 8;
  std::size_t layers = 4;
  std::size_t d_ff = 512;
  // Maximum number of input positions (BOS plus tokens).
  std::size_t context = 128;

  std::size_t head_dim() const { return d_model / heads; }
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Named slice of the flat parameter buffer.
struct TensorSlot {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return rows * cols; }
};

// Decoder-only transformer: token embedding plus a fixed sinusoidal position
// table, pre-norm blocks of causal multi-head attention and a GELU
// feedforward, a final layer norm and an output projection. All parameters,
// including the scalar log Z, live in one contiguous buffer.
class AttentionModel {
 public:
  AttentionModel(ModelConfig cfg, std::uint64_t seed);

  const ModelConfig& config() const noexcept { return cfg_; }
  const std::vector<TensorSlot>& layout() const noexcept { return layout_; }
  const TensorSlot& slot(std::string_view name) const;
  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  Eigen::Map<Matrix> tensor(std::string_view name);
  Eigen::Map<const Matrix> tensor(std::string_view name) const;

  double log_z() const { return params_.back(); }
  std::size_t log_z_index() const { return params_.size() - 1; }

  // Row t holds log p(. | ids[0..t]). Throws InputError when the input is
  // longer than the context or holds an unknown id.
  Matrix log_probs(std::span<const int> ids) const;

  // log P of `tokens` (no BOS, no EOS): next-token terms from BOS through EOS.
  double sequence_log_prob(std::span<const int> tokens) const;
  // Returns log P(tokens) and adds scale * d log P / d params into grad.
  double accumulate_gradient(std::span<const int> tokens, double scale,
                             std::vector<double>& grad) const;
  // As above with the scale chosen from log P after the forward pass.
  double accumulate_gradient(std::span<const int> tokens,
                             const std::function<double(double)>& scale_of,
                             std::vector<double>& grad) const;

  // Incremental decoding with cached keys and values; matches log_probs row
  // by row.
  class Decoder {
   public:
    explicit Decoder(const AttentionModel& model);
    // Feeds one id and returns log p(. | everything fed so far).
    Vector step(int id);
    std::size_t position() const noexcept { return pos_; }

   private:
    const AttentionModel& m_;
    std::size_t pos_ = 0;
    std::vector<std::vector<Matrix>> keys_;    // [layer][head], context x head_dim
    std::vector<std::vector<Matrix>> values_;
  };

 private:
  struct Cache;
  Matrix forward(std::span<const int> ids, Cache* cache) const;
  void backward(const Cache& cache, const Matrix& dlogits, std::vector<double>& grad) const;
  void check_ids(std::span<const int> ids) const;

  ModelConfig cfg_;
  std::vector<TensorSlot> layout_;
  std::vector<double> params_;
  Matrix positions_;
};

// Input ids for a token sequence: BOS followed by the tokens.
std::vector<int> with_bos(std::span<const int> tokens);

struct TrainExample {
  std::vector<int> tokens;
  double reward = 0.0;
};

// Maps a token sequence to a non-negative reward (e.g. a proxy model).
using RewardFn = std::function<double(std::span<const int>)>;

struct TrainConfig {
  std::size_t batch_size = 16;
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  double log_z_learning_rate = 1e-2;
  // Rewards are raised to 100 / train_temperature before the loss.
  double train_temperature = 100.0;
  double gen_temperature = 1.0;
  // Floor for the log-reward target.
  double reward_epsilon = 1e-6;
  // Share of each batch drawn from the model and scored by the reward
  // function instead of the dataset; 0 trains offline only.
  double online_fraction = 0.0;
  // Start log Z at log-sum-exp of the dataset targets: its value when the
  // model's mass sits exactly on the dataset, in proportion to reward.
  bool init_log_z = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  std::vector<double> epoch_loss;
  std::size_t steps = 0;
};

// Loss target for one reward: max(log(R^(100/T)), log eps).
double log_reward_target(double reward, const TrainConfig& cfg);

// Batch of (tokens, log-reward target) pairs.
using TargetBatch = std::vector<std::pair<std::vector<int>, double>>;

// Mean over the batch of (log Z + log P(A) - target)^2. When `grad` is given
// (sized like the parameters) the loss gradient is added to it.
double trajectory_balance_loss(const AttentionModel& model, const TargetBatch& batch,
                               std::vector<double>* grad = nullptr);

// Minimises the mean squared residual (log Z + log P(A) - target)^2 with
// Adam. Throws StageError on a non-finite loss.
TrainResult train_generator(AttentionModel& model, const std::vector<TrainExample>& data,
                            const TrainConfig& cfg, const RewardFn& online_reward = {},
                            const std::function<void(std::size_t, double)>& on_epoch = {});

struct Sample {
  std::vector<int> tokens;  // without BOS and EOS
  bool terminated = false;  // ended with EOS
};

// Autoregressive sampling with logits divided by `temperature`; below 1e-3
// the most likely token is taken. PAD and BOS are never drawn. Sample i uses
// its own generator seeded from (seed, i).
std::vector<Sample> sample_batch(const AttentionModel& model, std::size_t count,
                                 double temperature, std::uint64_t seed,
                                 std::size_t max_length = 0);

struct ProxyConfig {
  std::size_t embed_dim = 32;
  std::vector<std::size_t> hidden = {64, 32};
  std::size_t epochs = 300;
  std::size_t batch_size = 32;
  double learning_rate = 3e-3;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const;
};

// Sum-pooled token embeddings followed by a tanh MLP and a softplus head.
class ProxyModel {
 public:
  ProxyModel(std::size_t vocab_size, ProxyConfig cfg, std::uint64_t seed);

  double predict(std::span<const int> tokens) const;
  const ProxyConfig& config() const noexcept { return cfg_; }
  std::size_t vocab_size() const noexcept { return vocab_; }
  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  double scale() const noexcept { return scale_; }
  void set_scale(double s) { scale_ = s; }

  // Returns the prediction and adds scale * d prediction / d params.
  double accumulate_gradient(std::span<const int> tokens, double weight,
                             std::vector<double>& grad) const;

 private:
  struct Forward;
  double run(std::span<const int> tokens, Forward* f) const;

  std::size_t vocab_;
  ProxyConfig cfg_;
  std::vector<std::size_t> offsets_;  // embed, then (W, b) per layer, then head
  std::vector<double> params_;
  double scale_ = 1.0;  // predictions are scale * softplus(out)
};

// Inference-only snapshot of a proxy. Pooling is a plain sum, so the first
// hidden layer is folded into a per-token table. Later parameter changes to
// the source model are not seen.
class ProxyEvaluator {
 public:
  explicit ProxyEvaluator(const ProxyModel& model);

  double predict(std::span<const int> tokens) const;

 private:
  std::size_t vocab_;
  Matrix table_;                 // first-layer input per token, one column each
  Vector bias_;                  // first-layer bias (empty without hidden layers)
  std::vector<Matrix> weights_;  // remaining layers, out x in
  std::vector<Vector> biases_;
  Vector head_;
  double head_bias_ = 0.0;
  double scale_ = 1.0;
};

struct ProxyReport {
  std::shared_ptr<ProxyModel> model;
  double train_mre = 0.0;
  double heldout_mre = 0.0;  // NaN without a held-out split
  std::size_t train_size = 0;
  std::size_t heldout_size = 0;
  bool degenerate = false;  // every reward equal
};

// Mean relative error |p - y| / y over examples with y > 0.
double mean_relative_error(const ProxyModel& model, const std::vector<TrainExample>& data);

ProxyReport train_proxy(const std::vector<TrainExample>& data, std::size_t vocab_size,
                        const ProxyConfig& cfg);

// Checkpoints carry the vocabulary hash; loading against another vocabulary
// is an InputError.
void save_model(const AttentionModel& model, std::uint64_t vocab_hash,
                const std::filesystem::path& path);
AttentionModel load_model(const std::filesystem::path& path, std::uint64_t vocab_hash);
void save_proxy(const ProxyModel& model, std::uint64_t vocab_hash,
                const std::filesystem::path& path);
ProxyModel load_proxy(const std::filesystem::path& path, std::uint64_t vocab_hash);

}  // namespace lawforge::gen
