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
#include <numeric>
#include <random>
#include <sstream>

#include "lawforge/generator.hpp"

namespace lawforge::gen {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;
constexpr double kGreedyBelow = 1e-3;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class Adam {
 public:
  Adam(std::size_t n, double lr, double lr_last) : m_(n, 0.0), v_(n, 0.0), lr_(lr), lr_last_(lr_last) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const std::size_t last = params.size() - 1;
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      const double lr = i == last ? lr_last_ : lr_;
      params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + kAdamEps);
    }
  }

 private:
  std::vector<double> m_, v_;
  double lr_, lr_last_;
  std::size_t t_ = 0;
};

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (!(learning_rate > 0.0) || !(log_z_learning_rate > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (!(train_temperature > 0.0) || !(gen_temperature > 0.0)) {
    throw ConfigError("temperatures must be positive");
  }
  if (!(reward_epsilon > 0.0)) throw ConfigError("reward epsilon must be positive");
  if (!(online_fraction >= 0.0 && online_fraction <= 1.0)) {
    throw ConfigError("online fraction must lie in [0, 1]");
  }
}

double log_reward_target(double reward, const TrainConfig& cfg) {
  const double floor = std::log(cfg.reward_epsilon);
  if (!(reward > 0.0)) return floor;
  return std::max(100.0 / cfg.train_temperature * std::log(reward), floor);
}

double trajectory_balance_loss(const AttentionModel& model, const TargetBatch& batch,
                               std::vector<double>* grad) {
  if (batch.empty()) throw InputError("empty training batch");
  const double log_z = model.log_z();
  const double n = static_cast<double>(batch.size());
  double loss = 0.0;
  double dlog_z = 0.0;
  for (const auto& [tokens, target] : batch) {
    double log_p = 0.0;
    if (grad != nullptr) {
      model.accumulate_gradient(
          tokens,
          [&](double lp) {
            log_p = lp;
            return 2.0 * (log_z + lp - target) / n;
          },
          *grad);
    } else {
      log_p = model.sequence_log_prob(tokens);
    }
    const double residual = log_z + log_p - target;
    if (!std::isfinite(residual)) {
      std::ostringstream msg;
      msg << "non-finite loss: log Z = " << log_z << ", log P = " << log_p
          << ", target = " << target;
      throw StageError(msg.str());
    }
    loss += residual * residual / n;
    dlog_z += 2.0 * residual / n;
  }
  if (grad != nullptr) (*grad)[model.log_z_index()] += dlog_z;
  return loss;
}

TrainResult train_generator(AttentionModel& model, const std::vector<TrainExample>& data,
                            const TrainConfig& cfg, const RewardFn& online_reward,
                            const std::function<void(std::size_t, double)>& on_epoch) {
  cfg.validate();
  if (data.empty()) throw InputError("training dataset is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].reward) || data[i].reward < 0.0) {
      throw InputError("training example " + std::to_string(i) + " has an invalid reward");
    }
    if (data[i].tokens.size() + 1 > model.config().context) {
      throw InputError("training example " + std::to_string(i) + " exceeds the model context");
    }
  }
  const bool online = online_reward && cfg.online_fraction > 0.0;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto& params = model.parameters();
  if (cfg.init_log_z) {
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& ex : data) top = std::max(top, log_reward_target(ex.reward, cfg));
    double sum = 0.0;
    for (const auto& ex : data) sum += std::exp(log_reward_target(ex.reward, cfg) - top);
    params[model.log_z_index()] = top + std::log(sum);
  }
  std::vector<double> grad(params.size(), 0.0);
  Adam adam(params.size(), cfg.learning_rate, cfg.log_z_learning_rate);
  TrainResult result;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      TargetBatch batch;
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = data[order[i]];
        batch.emplace_back(ex.tokens, log_reward_target(ex.reward, cfg));
      }
      if (online) {
        const auto n = static_cast<std::size_t>(
            std::lround(cfg.online_fraction * static_cast<double>(batch.size())));
        for (auto& s : sample_batch(model, n, cfg.gen_temperature, rng())) {
          const double r = online_reward(s.tokens);
          batch.emplace_back(std::move(s.tokens), log_reward_target(r, cfg));
        }
      }

      std::fill(grad.begin(), grad.end(), 0.0);
      double loss = 0.0;
      try {
        loss = trajectory_balance_loss(model, batch, &grad);
      } catch (const StageError& e) {
        throw StageError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(batches) +
                         ": " + e.what());
      }
      adam.step(params, grad);
      epoch_loss += loss;
      ++batches;
      ++result.steps;
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(batches));
    if (on_epoch) on_epoch(epoch, result.epoch_loss.back());
  }
  return result;
}

std::vector<Sample> sample_batch(const AttentionModel& model, std::size_t count,
                                 double temperature, std::uint64_t seed, std::size_t max_length) {
  if (!(temperature > 0.0)) throw ConfigError("generation temperature must be positive");
  const std::size_t limit = model.config().context - 1;
  if (max_length == 0 || max_length > limit) max_length = limit;
  std::vector<Sample> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::mt19937_64 rng(splitmix(seed ^ splitmix(i + 1)));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    AttentionModel::Decoder dec(model);
    Vector lp = dec.step(kBos);
    Sample& s = out[i];
    while (true) {
      lp(kPad) = -std::numeric_limits<double>::infinity();
      lp(kBos) = -std::numeric_limits<double>::infinity();
      int token = 0;
      if (temperature < kGreedyBelow) {
        lp.maxCoeff(&token);
      } else {
        Vector w = lp / temperature;
        w = (w.array() - w.maxCoeff()).exp();
        double u = uni(rng) * w.sum();
        token = static_cast<int>(w.size()) - 1;
        for (Eigen::Index k = 0; k < w.size(); ++k) {
          u -= w(k);
          if (u < 0.0) {
            token = static_cast<int>(k);
            break;
          }
        }
      }
      if (token == kEos) {
        s.terminated = true;
        break;
      }
      s.tokens.push_back(token);
      if (s.tokens.size() >= max_length) break;
      lp = dec.step(token);
    }
  }
  return out;
}

}  // namespace lawforge::gen
