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

#include <cmath>
#include <random>

#include "lawforge/generator.hpp"

namespace lawforge::gen {

namespace {

constexpr double kLnEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

std::string layer_name(std::size_t l, const char* what) {
  return "l" + std::to_string(l) + "." + what;
}

std::string head_name(std::size_t l, const char* what, std::size_t h) {
  return layer_name(l, what) + "." + std::to_string(h);
}

double gelu(double u) {
  return 0.5 * u * (1.0 + std::tanh(kGeluC * (u + kGeluA * u * u * u)));
}

double gelu_grad(double u) {
  const double t = std::tanh(kGeluC * (u + kGeluA * u * u * u));
  return 0.5 * (1.0 + t) + 0.5 * u * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * kGeluA * u * u);
}

struct NormCache {
  Matrix xhat;
  Vector inv_sigma;
};

Matrix layer_norm(const Matrix& x, const ConstMap& g, const ConstMap& b, NormCache* cache) {
  const auto d = static_cast<double>(x.cols());
  Matrix xhat(x.rows(), x.cols());
  Vector inv(x.rows());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).sum() / d;
    const double var = (x.row(r).array() - mean).square().sum() / d;
    inv(r) = 1.0 / std::sqrt(var + kLnEps);
    xhat.row(r) = (x.row(r).array() - mean) * inv(r);
  }
  Matrix y = (xhat.array().rowwise() * g.col(0).transpose().array()).matrix();
  y.rowwise() += b.col(0).transpose();
  if (cache != nullptr) {
    cache->xhat = std::move(xhat);
    cache->inv_sigma = std::move(inv);
  }
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const NormCache& c, const ConstMap& g, MutMap dg,
                           MutMap db) {
  dg.col(0) += (dy.array() * c.xhat.array()).colwise().sum().transpose().matrix();
  db.col(0) += dy.colwise().sum().transpose();
  const Matrix dxhat = (dy.array().rowwise() * g.col(0).transpose().array()).matrix();
  const auto d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double m1 = dxhat.row(r).sum() / d;
    const double m2 = dxhat.row(r).dot(c.xhat.row(r)) / d;
    dx.row(r) = c.inv_sigma(r) * (dxhat.row(r).array() - m1 - c.xhat.row(r).array() * m2).matrix();
  }
  return dx;
}

Matrix sinusoid_table(std::size_t context, std::size_t d) {
  Matrix p(static_cast<Eigen::Index>(context), static_cast<Eigen::Index>(d));
  for (std::size_t pos = 0; pos < context; ++pos) {
    for (std::size_t i = 0; i < d; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d));
      const double angle = static_cast<double>(pos) * freq;
      p(static_cast<Eigen::Index>(pos), static_cast<Eigen::Index>(i)) =
          i % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return p;
}

}  // namespace

void ModelConfig::validate() const {
  if (vocab_size <= static_cast<std::size_t>(kEos)) {
    throw ConfigError("model vocabulary must hold the special tokens");
  }
  if (d_model == 0 || heads == 0 || layers == 0 || d_ff == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (d_model % heads != 0) throw ConfigError("model width must be divisible by the head count");
  if (context < 2) throw ConfigError("model context must hold at least two positions");
}

struct AttentionModel::Cache {
  struct Layer {
    Matrix h_in;
    NormCache ln1;
    Matrix a;
    std::vector<Matrix> q, k, v, p;
    Matrix concat;
    Matrix h_mid;
    NormCache ln2;
    Matrix b;
    Matrix u;
    Matrix g;
  };
  std::vector<int> ids;
  std::vector<Layer> layers;
  Matrix h_out;
  NormCache lnf;
  Matrix z;
};

AttentionModel::AttentionModel(ModelConfig cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t d = cfg_.d_model;
  const std::size_t dh = cfg_.head_dim();
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout_.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("embed", cfg_.vocab_size, d);
  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    add(layer_name(l, "ln1.g"), d, 1);
    add(layer_name(l, "ln1.b"), d, 1);
    for (std::size_t h = 0; h < cfg_.heads; ++h) {
      add(head_name(l, "wq", h), d, dh);
      add(head_name(l, "wk", h), d, dh);
      add(head_name(l, "wv", h), d, dh);
    }
    add(layer_name(l, "wo"), d, d);
    add(layer_name(l, "ln2.g"), d, 1);
    add(layer_name(l, "ln2.b"), d, 1);
    add(layer_name(l, "w1"), d, cfg_.d_ff);
    add(layer_name(l, "b1"), cfg_.d_ff, 1);
    add(layer_name(l, "w2"), cfg_.d_ff, d);
    add(layer_name(l, "b2"), d, 1);
  }
  add("lnf.g", d, 1);
  add("lnf.b", d, 1);
  add("out.w", d, cfg_.vocab_size);
  add("out.b", cfg_.vocab_size, 1);
  add("log_z", 1, 1);
  params_.assign(offset, 0.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (const auto& s : layout_) {
    const bool gain = s.name.ends_with(".g");
    const bool zero = s.cols == 1 && !gain;  // biases and log Z
    double stddev = 1.0 / std::sqrt(static_cast<double>(s.rows));
    if (s.name == "embed") stddev = 0.1;
    if (s.name.ends_with(".w2") || s.name.ends_with(".wo")) {
      stddev /= std::sqrt(2.0 * static_cast<double>(cfg_.layers));
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      params_[s.offset + i] = gain ? 1.0 : zero ? 0.0 : stddev * normal(rng);
    }
  }
  positions_ = sinusoid_table(cfg_.context, d);
}

const TensorSlot& AttentionModel::slot(std::string_view name) const {
  for (const auto& s : layout_) {
    if (s.name == name) return s;
  }
  throw InputError("no model tensor named '" + std::string(name) + "'");
}

Eigen::Map<Matrix> AttentionModel::tensor(std::string_view name) {
  const auto& s = slot(name);
  return {params_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols)};
}

Eigen::Map<const Matrix> AttentionModel::tensor(std::string_view name) const {
  const auto& s = slot(name);
  return {params_.data() + s.offset, static_cast<Eigen::Index>(s.rows),
          static_cast<Eigen::Index>(s.cols)};
}

void AttentionModel::check_ids(std::span<const int> ids) const {
  if (ids.empty()) throw InputError("model input is empty");
  if (ids.size() > cfg_.context) {
    throw InputError("sequence of " + std::to_string(ids.size()) +
                     " positions exceeds the model context of " + std::to_string(cfg_.context));
  }
  for (int id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= cfg_.vocab_size) {
      throw InputError("token id " + std::to_string(id) + " outside the vocabulary");
    }
  }
}

Matrix AttentionModel::forward(std::span<const int> ids, Cache* cache) const {
  check_ids(ids);
  const auto T = static_cast<Eigen::Index>(ids.size());
  const auto dh = static_cast<Eigen::Index>(cfg_.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto embed = tensor("embed");

  Matrix h(T, static_cast<Eigen::Index>(cfg_.d_model));
  for (Eigen::Index t = 0; t < T; ++t) h.row(t) = embed.row(ids[static_cast<std::size_t>(t)]) + positions_.row(t);
  if (cache != nullptr) {
    cache->ids.assign(ids.begin(), ids.end());
    cache->layers.resize(cfg_.layers);
  }

  for (std::size_t l = 0; l < cfg_.layers; ++l) {
    Cache::Layer* lc = cache != nullptr ? &cache->layers[l] : nullptr;
    if (lc != nullptr) lc->h_in = h;
    NormCache ln1;
    const Matrix a = layer_norm(h, tensor(layer_name(l, "ln1.g")), tensor(layer_name(l, "ln1.b")),
                                lc != nullptr ? &ln1 : nullptr);
    Matrix concat(T, static_cast<Eigen::Index>(cfg_.d_model));
    for (std::size_t hd = 0; hd < cfg_.heads; ++hd) {
      Matrix q = a * tensor(head_name(l, "wq", hd));
      Matrix k = a * tensor(head_name(l, "wk", hd));
      Matrix v = a * tensor(head_name(l, "wv", hd));
      Matrix p = (q * k.transpose()) * scale;
      for (Eigen::Index i = 0; i < T; ++i) {
        const double mx = p.row(i).head(i + 1).maxCoeff();
        double sum = 0.0;
        for (Eigen::Index j = 0; j < T; ++j) {
          p(i, j) = j <= i ? std::exp(p(i, j) - mx) : 0.0;
          sum += p(i, j);
        }
        p.row(i) /= sum;
      }
      concat.middleCols(static_cast<Eigen::Index>(hd) * dh, dh) = p * v;
      if (lc != nullptr) {
        lc->q.push_back(std::move(q));
        lc->k.push_back(std::move(k));
        lc->v.push_back(std::move(v));
        lc->p.push_back(std::move(p));
      }
    }
    h += concat * tensor(layer_name(l, "wo"));
    NormCache ln2;
    const Matrix b = layer_norm(h, tensor(layer_name(l, "ln2.g")), tensor(layer_name(l, "ln2.b")),
                                lc != nullptr ? &ln2 : nullptr);
    Matrix u = b * tensor(layer_name(l, "w1"));
    u.rowwise() += tensor(layer_name(l, "b1")).col(0).transpose();
    const Matrix g = u.unaryExpr([](double x) { return gelu(x); });
    Matrix f = g * tensor(layer_name(l, "w2"));
    f.rowwise() += tensor(layer_name(l, "b2")).col(0).transpose();
    if (lc != nullptr) {
      lc->ln1 = std::move(ln1);
      lc->a = a;
      lc->concat = concat;
      lc->h_mid = h;
      lc->ln2 = std::move(ln2);
      lc->b = b;
      lc->u = std::move(u);
      lc->g = g;
    }
    h += f;
  }
  NormCache lnf;
  const Matrix z = layer_norm(h, tensor("lnf.g"), tensor("lnf.b"), cache != nullptr ? &lnf : nullptr);
  Matrix logits = z * tensor("out.w");
  logits.rowwise() += tensor("out.b").col(0).transpose();
  for (Eigen::Index t = 0; t < T; ++t) {
    const double mx = logits.row(t).maxCoeff();
    const double lse = mx + std::log((logits.row(t).array() - mx).exp().sum());
    logits.row(t).array() -= lse;
  }
  if (cache != nullptr) {
    cache->h_out = h;
    cache->lnf = std::move(lnf);
    cache->z = z;
  }
  return logits;
}

void AttentionModel::backward(const Cache& c, const Matrix& dlogits,
                              std::vector<double>& grad) const {
  auto gmap = [&](std::string_view name) {
    const auto& s = slot(name);
    return MutMap(grad.data() + s.offset, static_cast<Eigen::Index>(s.rows),
                  static_cast<Eigen::Index>(s.cols));
  };
  const auto T = dlogits.rows();
  const auto dh = static_cast<Eigen::Index>(cfg_.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

  gmap("out.b").col(0) += dlogits.colwise().sum().transpose();
  gmap("out.w") += c.z.transpose() * dlogits;
  const Matrix dz = dlogits * tensor("out.w").transpose();
  Matrix dh_cur = layer_norm_backward(dz, c.lnf, tensor("lnf.g"), gmap("lnf.g"), gmap("lnf.b"));

  for (std::size_t li = cfg_.layers; li-- > 0;) {
    const auto& lc = c.layers[li];
    // Feedforward branch.
    const Matrix& df = dh_cur;
    gmap(layer_name(li, "w2")) += lc.g.transpose() * df;
    gmap(layer_name(li, "b2")).col(0) += df.colwise().sum().transpose();
    const Matrix dg = df * tensor(layer_name(li, "w2")).transpose();
    const Matrix du = (dg.array() * lc.u.unaryExpr([](double x) { return gelu_grad(x); }).array()).matrix();
    gmap(layer_name(li, "w1")) += lc.b.transpose() * du;
    gmap(layer_name(li, "b1")).col(0) += du.colwise().sum().transpose();
    const Matrix db = du * tensor(layer_name(li, "w1")).transpose();
    Matrix dh_mid = dh_cur + layer_norm_backward(db, lc.ln2, tensor(layer_name(li, "ln2.g")),
                                                 gmap(layer_name(li, "ln2.g")),
                                                 gmap(layer_name(li, "ln2.b")));
    // Attention branch.
    gmap(layer_name(li, "wo")) += lc.concat.transpose() * dh_mid;
    const Matrix dconcat = dh_mid * tensor(layer_name(li, "wo")).transpose();
    Matrix da = Matrix::Zero(T, static_cast<Eigen::Index>(cfg_.d_model));
    for (std::size_t hd = 0; hd < cfg_.heads; ++hd) {
      const Matrix dhead = dconcat.middleCols(static_cast<Eigen::Index>(hd) * dh, dh);
      const Matrix& p = lc.p[hd];
      const Matrix dp = dhead * lc.v[hd].transpose();
      const Matrix dv = p.transpose() * dhead;
      Matrix ds = p.array() * (dp.array().colwise() - (dp.array() * p.array()).rowwise().sum());
      ds *= scale;
      const Matrix dq = ds * lc.k[hd];
      const Matrix dk = ds.transpose() * lc.q[hd];
      gmap(head_name(li, "wq", hd)) += lc.a.transpose() * dq;
      gmap(head_name(li, "wk", hd)) += lc.a.transpose() * dk;
      gmap(head_name(li, "wv", hd)) += lc.a.transpose() * dv;
      da += dq * tensor(head_name(li, "wq", hd)).transpose();
      da += dk * tensor(head_name(li, "wk", hd)).transpose();
      da += dv * tensor(head_name(li, "wv", hd)).transpose();
    }
    dh_cur = dh_mid + layer_norm_backward(da, lc.ln1, tensor(layer_name(li, "ln1.g")),
                                          gmap(layer_name(li, "ln1.g")),
                                          gmap(layer_name(li, "ln1.b")));
  }
  auto dembed = gmap("embed");
  for (Eigen::Index t = 0; t < T; ++t) dembed.row(c.ids[static_cast<std::size_t>(t)]) += dh_cur.row(t);
}

Matrix AttentionModel::log_probs(std::span<const int> ids) const { return forward(ids, nullptr); }

std::vector<int> with_bos(std::span<const int> tokens) {
  std::vector<int> ids;
  ids.reserve(tokens.size() + 1);
  ids.push_back(kBos);
  ids.insert(ids.end(), tokens.begin(), tokens.end());
  return ids;
}

double AttentionModel::sequence_log_prob(std::span<const int> tokens) const {
  const auto ids = with_bos(tokens);
  const Matrix lp = forward(ids, nullptr);
  double total = 0.0;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int target = t + 1 < ids.size() ? ids[t + 1] : kEos;
    total += lp(static_cast<Eigen::Index>(t), target);
  }
  return total;
}

double AttentionModel::accumulate_gradient(std::span<const int> tokens, double scale,
                                           std::vector<double>& grad) const {
  return accumulate_gradient(tokens, [scale](double) { return scale; }, grad);
}

double AttentionModel::accumulate_gradient(std::span<const int> tokens,
                                           const std::function<double(double)>& scale_of,
                                           std::vector<double>& grad) const {
  if (grad.size() != params_.size()) grad.assign(params_.size(), 0.0);
  const auto ids = with_bos(tokens);
  Cache cache;
  const Matrix lp = forward(ids, &cache);
  double total = 0.0;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int target = t + 1 < ids.size() ? ids[t + 1] : kEos;
    total += lp(static_cast<Eigen::Index>(t), target);
  }
  const double scale = scale_of(total);
  if (scale == 0.0) return total;
  // d log P / d logits = onehot(target) - softmax, per position.
  Matrix dlogits = -lp.array().exp().matrix() * scale;
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const int target = t + 1 < ids.size() ? ids[t + 1] : kEos;
    dlogits(static_cast<Eigen::Index>(t), target) += scale;
  }
  backward(cache, dlogits, grad);
  return total;
}

AttentionModel::Decoder::Decoder(const AttentionModel& model) : m_(model) {
  const auto& cfg = m_.cfg_;
  keys_.assign(cfg.layers, std::vector<Matrix>(cfg.heads));
  values_.assign(cfg.layers, std::vector<Matrix>(cfg.heads));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    for (std::size_t h = 0; h < cfg.heads; ++h) {
      keys_[l][h].resize(static_cast<Eigen::Index>(cfg.context), static_cast<Eigen::Index>(cfg.head_dim()));
      values_[l][h].resize(static_cast<Eigen::Index>(cfg.context), static_cast<Eigen::Index>(cfg.head_dim()));
    }
  }
}

Vector AttentionModel::Decoder::step(int id) {
  const auto& cfg = m_.cfg_;
  if (pos_ >= cfg.context) throw InputError("decoder ran past the model context");
  const int one[] = {id};
  m_.check_ids(one);
  const auto dh = static_cast<Eigen::Index>(cfg.head_dim());
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const auto n = static_cast<Eigen::Index>(pos_ + 1);

  Matrix h = m_.tensor("embed").row(id) + m_.positions_.row(static_cast<Eigen::Index>(pos_));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const Matrix a = layer_norm(h, m_.tensor(layer_name(l, "ln1.g")),
                                m_.tensor(layer_name(l, "ln1.b")), nullptr);
    Matrix concat(1, static_cast<Eigen::Index>(cfg.d_model));
    for (std::size_t hd = 0; hd < cfg.heads; ++hd) {
      const Matrix q = a * m_.tensor(head_name(l, "wq", hd));
      keys_[l][hd].row(n - 1) = a * m_.tensor(head_name(l, "wk", hd));
      values_[l][hd].row(n - 1) = a * m_.tensor(head_name(l, "wv", hd));
      Vector s = (keys_[l][hd].topRows(n) * q.transpose()) * scale;
      s = (s.array() - s.maxCoeff()).exp();
      s /= s.sum();
      concat.middleCols(static_cast<Eigen::Index>(hd) * dh, dh) =
          s.transpose() * values_[l][hd].topRows(n);
    }
    h += concat * m_.tensor(layer_name(l, "wo"));
    const Matrix b = layer_norm(h, m_.tensor(layer_name(l, "ln2.g")),
                                m_.tensor(layer_name(l, "ln2.b")), nullptr);
    Matrix u = b * m_.tensor(layer_name(l, "w1"));
    u.row(0) += m_.tensor(layer_name(l, "b1")).col(0).transpose();
    Matrix f = u.unaryExpr([](double x) { return gelu(x); }) * m_.tensor(layer_name(l, "w2"));
    f.row(0) += m_.tensor(layer_name(l, "b2")).col(0).transpose();
    h += f;
  }
  const Matrix z = layer_norm(h, m_.tensor("lnf.g"), m_.tensor("lnf.b"), nullptr);
  Vector logits = (z * m_.tensor("out.w")).transpose() + m_.tensor("out.b").col(0);
  const double mx = logits.maxCoeff();
  logits.array() -= mx + std::log((logits.array() - mx).exp().sum());
  ++pos_;
  return logits;
}

}  // namespace lawforge::gen
