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

#include "lawforge/generator.hpp"

namespace lawforge::gen {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// tanh through the packet exp; Eigen evaluates double tanh one scalar at a time.
Vector fast_tanh(const Vector& x) {
  return (1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0)).matrix();
}

}  // namespace

void ProxyConfig::validate() const {
  if (embed_dim == 0) throw ConfigError("proxy embedding width must be positive");
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("proxy hidden widths must be positive");
  }
  if (epochs < 1 || batch_size < 1) throw ConfigError("proxy epochs and batch size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("proxy learning rate must be positive");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("proxy holdout fraction must lie in [0, 1)");
  }
}

struct ProxyModel::Forward {
  Vector pooled;
  std::vector<Vector> acts;  // post-tanh activation per hidden layer
  double out = 0.0;
};

ProxyModel::ProxyModel(std::size_t vocab_size, ProxyConfig cfg, std::uint64_t seed)
    : vocab_(vocab_size), cfg_(std::move(cfg)) {
  cfg_.validate();
  std::size_t offset = 0;
  offsets_.push_back(offset);
  offset += vocab_ * cfg_.embed_dim;
  std::size_t in = cfg_.embed_dim;
  for (std::size_t h : cfg_.hidden) {
    offsets_.push_back(offset);
    offset += in * h + h;
    in = h;
  }
  offsets_.push_back(offset);
  offset += in + 1;
  params_.assign(offset, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < vocab_ * cfg_.embed_dim; ++i) params_[i] = 0.1 * normal(rng);
  in = cfg_.embed_dim;
  for (std::size_t k = 0; k < cfg_.hidden.size(); ++k) {
    const std::size_t h = cfg_.hidden[k];
    const double sd = 1.0 / std::sqrt(static_cast<double>(in));
    for (std::size_t i = 0; i < in * h; ++i) params_[offsets_[k + 1] + i] = sd * normal(rng);
    in = h;
  }
  const double sd = 1.0 / std::sqrt(static_cast<double>(in));
  for (std::size_t i = 0; i < in; ++i) params_[offsets_.back() + i] = sd * normal(rng);
}

double ProxyModel::run(std::span<const int> tokens, Forward* f) const {
  const auto e = static_cast<Eigen::Index>(cfg_.embed_dim);
  // One contiguous column per token.
  Eigen::Map<const Matrix> embed(params_.data(), e, static_cast<Eigen::Index>(vocab_));
  Vector x = Vector::Zero(e);
  for (int id : tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_) {
      throw InputError("token id " + std::to_string(id) + " outside the proxy vocabulary");
    }
    if (id > kEos) x += embed.col(id);
  }
  if (f != nullptr) f->pooled = x;
  auto in = e;
  for (std::size_t k = 0; k < cfg_.hidden.size(); ++k) {
    const auto h = static_cast<Eigen::Index>(cfg_.hidden[k]);
    Eigen::Map<const Matrix> w(params_.data() + offsets_[k + 1], in, h);
    Eigen::Map<const Vector> b(params_.data() + offsets_[k + 1] + in * h, h);
    x = fast_tanh(w.transpose() * x + b);
    if (f != nullptr) f->acts.push_back(x);
    in = h;
  }
  Eigen::Map<const Vector> w(params_.data() + offsets_.back(), in);
  const double out = w.dot(x) + params_[offsets_.back() + static_cast<std::size_t>(in)];
  if (f != nullptr) f->out = out;
  return scale_ * softplus(out);
}

double ProxyModel::predict(std::span<const int> tokens) const { return run(tokens, nullptr); }

ProxyEvaluator::ProxyEvaluator(const ProxyModel& model)
    : vocab_(model.vocab_size()), scale_(model.scale()) {
  const auto& cfg = model.config();
  const auto& p = model.parameters();
  const auto e = static_cast<Eigen::Index>(cfg.embed_dim);
  const auto v = static_cast<Eigen::Index>(vocab_);
  Eigen::Map<const Matrix> embed(p.data(), e, v);
  std::size_t offset = vocab_ * cfg.embed_dim;
  auto in = e;
  for (std::size_t k = 0; k < cfg.hidden.size(); ++k) {
    const auto h = static_cast<Eigen::Index>(cfg.hidden[k]);
    Eigen::Map<const Matrix> w(p.data() + offset, in, h);
    Eigen::Map<const Vector> b(p.data() + offset + static_cast<std::size_t>(in * h), h);
    if (k == 0) {
      table_ = w.transpose() * embed;
      bias_ = b;
    } else {
      weights_.emplace_back(w.transpose());
      biases_.emplace_back(b);
    }
    offset += static_cast<std::size_t>(in * h + h);
    in = h;
  }
  if (cfg.hidden.empty()) table_ = embed;
  head_ = Eigen::Map<const Vector>(p.data() + offset, in);
  head_bias_ = p[offset + static_cast<std::size_t>(in)];
}

double ProxyEvaluator::predict(std::span<const int> tokens) const {
  Vector x = Vector::Zero(table_.rows());
  for (int id : tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_) {
      throw InputError("token id " + std::to_string(id) + " outside the proxy vocabulary");
    }
    if (id > kEos) x += table_.col(id);
  }
  if (bias_.size() > 0) x = fast_tanh(x + bias_);
  for (std::size_t k = 0; k < weights_.size(); ++k) x = fast_tanh(weights_[k] * x + biases_[k]);
  return scale_ * softplus(head_.dot(x) + head_bias_);
}

double ProxyModel::accumulate_gradient(std::span<const int> tokens, double weight,
                                       std::vector<double>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
  Forward f;
  const double pred = run(tokens, &f);
  const auto e = static_cast<Eigen::Index>(cfg_.embed_dim);
  const std::size_t L = cfg_.hidden.size();
  const auto last = static_cast<Eigen::Index>(L == 0 ? cfg_.embed_dim : cfg_.hidden.back());
  const Vector& top = L == 0 ? f.pooled : f.acts.back();

  const double dout = weight * scale_ * sigmoid(f.out);
  Eigen::Map<Vector> gw(grad.data() + offsets_.back(), last);
  gw += dout * top;
  grad[offsets_.back() + static_cast<std::size_t>(last)] += dout;
  Vector dx = dout * Eigen::Map<const Vector>(params_.data() + offsets_.back(), last);

  for (std::size_t k = L; k-- > 0;) {
    const auto h = static_cast<Eigen::Index>(cfg_.hidden[k]);
    const auto in = static_cast<Eigen::Index>(k == 0 ? cfg_.embed_dim : cfg_.hidden[k - 1]);
    const Vector& below = k == 0 ? f.pooled : f.acts[k - 1];
    const Vector dpre = (dx.array() * (1.0 - f.acts[k].array().square())).matrix();
    Eigen::Map<Matrix> gW(grad.data() + offsets_[k + 1], in, h);
    Eigen::Map<Vector> gb(grad.data() + offsets_[k + 1] + in * h, h);
    gW += below * dpre.transpose();
    gb += dpre;
    dx = Eigen::Map<const Matrix>(params_.data() + offsets_[k + 1], in, h) * dpre;
  }
  Eigen::Map<Matrix> gembed(grad.data(), e, static_cast<Eigen::Index>(vocab_));
  for (int id : tokens) {
    if (id > kEos) gembed.col(id) += dx;
  }
  return pred;
}

double mean_relative_error(const ProxyModel& model, const std::vector<TrainExample>& data) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ex : data) {
    if (!(ex.reward > 0.0)) continue;
    sum += std::abs(model.predict(ex.tokens) - ex.reward) / ex.reward;
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

ProxyReport train_proxy(const std::vector<TrainExample>& data, std::size_t vocab_size,
                        const ProxyConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw InputError("proxy dataset is empty");
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i].reward) || data[i].reward < 0.0) {
      throw InputError("proxy example " + std::to_string(i) + " has an invalid reward");
    }
  }
  ProxyReport report;
  report.degenerate = std::all_of(data.begin(), data.end(),
                                  [&](const TrainExample& e) { return e.reward == data[0].reward; });

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto held = static_cast<std::size_t>(cfg.holdout_fraction * static_cast<double>(data.size()));
  if (held >= data.size()) held = data.size() - 1;
  std::vector<TrainExample> train, heldout;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < held ? heldout : train).push_back(data[order[i]]);
  }

  auto model = std::make_shared<ProxyModel>(vocab_size, cfg, rng());
  double mean = 0.0;
  for (const auto& ex : train) mean += ex.reward;
  mean /= static_cast<double>(train.size());
  model->set_scale(mean > 0.0 ? mean : 1.0);

  auto& params = model->parameters();
  std::vector<double> grad(params.size(), 0.0), m(params.size(), 0.0), v(params.size(), 0.0);
  std::vector<std::size_t> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::size_t t = 0;
  const double norm = model->scale() * model->scale();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(idx.size(), start + cfg.batch_size);
      const double n = static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t i = start; i < end; ++i) {
        const auto& ex = train[idx[i]];
        // Squared error relative to the reward scale.
        const double pred = model->predict(ex.tokens);
        model->accumulate_gradient(ex.tokens, 2.0 * (pred - ex.reward) / (n * norm), grad);
      }
      ++t;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t));
      for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * grad[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * grad[i] * grad[i];
        params[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + kAdamEps);
      }
    }
  }
  report.model = model;
  report.train_size = train.size();
  report.heldout_size = heldout.size();
  report.train_mre = mean_relative_error(*model, train);
  report.heldout_mre = heldout.empty() ? std::numeric_limits<double>::quiet_NaN()
                                       : mean_relative_error(*model, heldout);
  return report;
}

}  // namespace lawforge::gen
