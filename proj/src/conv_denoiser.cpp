/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The squishdiff Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "squishdiff/denoiser.hpp"

#include "squishdiff/errors.hpp"

#include <cmath>
#include <bit>
#include <cstring>
#include <fstream>
#include <numbers>

namespace squishdiff {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

MatrixXd silu(const MatrixXd& x) {
  return x.unaryExpr([](double v) { return v * sigmoid(v); });
}

MatrixXd silu_grad(const MatrixXd& x) {
  return x.unaryExpr([](double v) {
    const double s = sigmoid(v);
    return s * (1.0 + v * (1.0 - s));
  });
}

// 3x3 zero-padded patches. Row t*cin + c of the result holds channel c at tap
// t = (dy+1)*3 + (dx+1); columns follow the input (example-major, then pixel).
MatrixXd im2col(const MatrixXd& x, int side) {
  const Index cin = x.rows();
  const Index hw = static_cast<Index>(side) * side;
  MatrixXd cols = MatrixXd::Zero(9 * cin, x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const Index base = (j / hw) * hw;
    const int y = static_cast<int>((j % hw) / side);
    const int xx = static_cast<int>((j % hw) % side);
    for (int t = 0; t < 9; ++t) {
      const int yy = y + t / 3 - 1;
      const int xs = xx + t % 3 - 1;
      if (yy < 0 || xs < 0 || yy >= side || xs >= side) continue;
      cols.block(t * cin, j, cin, 1) = x.col(base + yy * side + xs);
    }
  }
  return cols;
}

// Adjoint of im2col.
MatrixXd col2im(const MatrixXd& cols, Index cin, int side) {
  const Index hw = static_cast<Index>(side) * side;
  MatrixXd x = MatrixXd::Zero(cin, cols.cols());
  for (Index j = 0; j < cols.cols(); ++j) {
    const Index base = (j / hw) * hw;
    const int y = static_cast<int>((j % hw) / side);
    const int xx = static_cast<int>((j % hw) % side);
    for (int t = 0; t < 9; ++t) {
      const int yy = y + t / 3 - 1;
      const int xs = xx + t % 3 - 1;
      if (yy < 0 || xs < 0 || yy >= side || xs >= side) continue;
      x.col(base + yy * side + xs) += cols.block(t * cin, j, cin, 1);
    }
  }
  return x;
}

double gaussian(Philox& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Parameter group indices inside the layout vector.
constexpr int kInW = 0, kInB = 1;
constexpr int kPerBlock = 6;  // conv1.w conv1.b time.w time.b conv2.w conv2.b
int block_group(int block, int which) { return 2 + block * kPerBlock + which; }

}  // namespace

std::vector<ParameterGroup> conv_parameter_layout(const ConvConfig& c) {
  if (c.channels <= 0 || c.side <= 0 || c.width <= 0 || c.blocks < 0 || c.embed_dim <= 0 ||
      c.embed_dim % 2 != 0)
    throw ParameterError("invalid denoiser shape");
  std::vector<ParameterGroup> groups;
  Index offset = 0;
  auto add = [&](std::string name, Index rows, Index cols) {
    groups.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("input.weight", c.width, 9 * c.channels);
  add("input.bias", c.width, 1);
  for (int b = 0; b < c.blocks; ++b) {
    const std::string p = "block" + std::to_string(b) + ".";
    add(p + "conv1.weight", c.width, 9 * c.width);
    add(p + "conv1.bias", c.width, 1);
    add(p + "time.weight", c.width, c.embed_dim);
    add(p + "time.bias", c.width, 1);
    add(p + "conv2.weight", c.width, 9 * c.width);
    add(p + "conv2.bias", c.width, 1);
  }
  add("head.weight", 2 * c.channels, 9 * c.width);
  add("head.bias", 2 * c.channels, 1);
  return groups;
}

void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0) || c.batch_size <= 0 || c.iterations <= 0 || !(c.grad_clip > 0) ||
      !(c.lambda >= 0))
    throw ConfigurationError("training hyperparameters must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigurationError("dropout must be in [0, 1)");
}

ConvDenoiser::ConvDenoiser(const ConvConfig& config, std::uint64_t seed)
    : config_(config), groups_(conv_parameter_layout(config)) {
  const ParameterGroup& last = groups_.back();
  theta_ = VectorXd::Zero(last.offset + last.size());
  Philox rng(seed);
  for (const auto& g : groups_) {
    const bool is_weight = g.cols > 1 && g.name.rfind("head.", 0) != 0;
    if (!is_weight) continue;
    const double scale = 1.0 / std::sqrt(static_cast<double>(g.cols));
    for (Index i = 0; i < g.size(); ++i) theta_(g.offset + i) = scale * gaussian(rng);
  }
}

ConvDenoiser::ConvDenoiser(const ConvConfig& config, VectorXd parameters)
    : config_(config), groups_(conv_parameter_layout(config)), theta_(std::move(parameters)) {
  const ParameterGroup& last = groups_.back();
  if (theta_.size() != last.offset + last.size())
    throw ShapeError("parameter vector length does not match the denoiser shape");
}

VectorXd ConvDenoiser::step_embedding(int k) const {
  const int half = config_.embed_dim / 2;
  VectorXd e(config_.embed_dim);
  for (int i = 0; i < half; ++i) {
    // Frequencies decay geometrically from 1 to 1e-4.
    const double freq =
        half == 1 ? 1.0 : std::exp(-std::log(1e4) * static_cast<double>(i) / (half - 1));
    e(i) = std::sin(k * freq);
    e(half + i) = std::cos(k * freq);
  }
  return e;
}

struct ConvDenoiser::Cache {
  MatrixXd cols_in;
  std::vector<MatrixXd> h;  // h[0] after the input conv, h[b+1] after block b
  std::vector<MatrixXd> cols1, z1, mask, cols2;
  MatrixXd cols_head;
  MatrixXd embed;  // embed_dim x batch
};

MatrixXd ConvDenoiser::forward(std::span<const TopologyTensor* const> xs, std::span<const int> ks,
                               double dropout, Philox* rng, Cache* cache) const {
  const ConvConfig& c = config_;
  const Index hw = static_cast<Index>(c.side) * c.side;
  const Index batch = static_cast<Index>(xs.size());
  if (static_cast<Index>(ks.size()) != batch) throw ShapeError("batch sizes differ");
  auto W = [&](int g) {
    const ParameterGroup& p = groups_[g];
    return Eigen::Map<const MatrixXd>(theta_.data() + p.offset, p.rows, p.cols);
  };
  auto B = [&](int g) {
    const ParameterGroup& p = groups_[g];
    return Eigen::Map<const VectorXd>(theta_.data() + p.offset, p.rows);
  };

  MatrixXd x(c.channels, batch * hw);
  MatrixXd embed(c.embed_dim, batch);
  for (Index b = 0; b < batch; ++b) {
    const TopologyTensor& t = *xs[b];
    if (t.channels != c.channels || t.side != c.side)
      throw ContractError("input tensor shape does not match the denoiser");
    x.middleCols(b * hw, hw) = t.data.cast<double>().array() * 2.0 - 1.0;
    embed.col(b) = step_embedding(ks[b]);
  }

  MatrixXd cols = im2col(x, c.side);
  MatrixXd h = (W(kInW) * cols).colwise() + B(kInB);
  if (cache) {
    cache->cols_in = std::move(cols);
    cache->embed = embed;
    cache->h = {h};
  }
  for (int blk = 0; blk < c.blocks; ++blk) {
    MatrixXd cols1 = im2col(silu(h), c.side);
    MatrixXd z1 = (W(block_group(blk, 0)) * cols1).colwise() + B(block_group(blk, 1));
    const MatrixXd time_bias =
        (W(block_group(blk, 2)) * embed).colwise() + B(block_group(blk, 3));
    for (Index b = 0; b < batch; ++b) z1.middleCols(b * hw, hw).colwise() += time_bias.col(b);
    MatrixXd a2 = silu(z1);
    MatrixXd mask;
    if (dropout > 0.0 && rng) {
      mask.resize(a2.rows(), a2.cols());
      const double keep = 1.0 / (1.0 - dropout);
      for (Index i = 0; i < mask.size(); ++i) mask(i) = rng->uniform() < dropout ? 0.0 : keep;
      a2.array() *= mask.array();
    }
    MatrixXd cols2 = im2col(a2, c.side);
    h += (W(block_group(blk, 4)) * cols2).colwise() + B(block_group(blk, 5));
    if (cache) {
      cache->cols1.push_back(std::move(cols1));
      cache->z1.push_back(std::move(z1));
      cache->mask.push_back(std::move(mask));
      cache->cols2.push_back(std::move(cols2));
      cache->h.push_back(h);
    }
  }
  const int head = static_cast<int>(groups_.size()) - 2;
  MatrixXd cols_head = im2col(silu(h), c.side);
  MatrixXd out = (W(head) * cols_head).colwise() + B(head + 1);
  if (cache) cache->cols_head = std::move(cols_head);
  return out;
}

MatrixXd ConvDenoiser::logits(const TopologyTensor& xk, int k) const {
  const TopologyTensor* ptr = &xk;
  return forward({&ptr, 1}, {&k, 1}, 0.0, nullptr, nullptr);
}

std::vector<EntryProbs> ConvDenoiser::predict_batch(std::span<const TopologyTensor> xs,
                                                    std::span<const int> ks) const {
  std::vector<const TopologyTensor*> ptrs;
  ptrs.reserve(xs.size());
  for (const auto& t : xs) ptrs.push_back(&t);
  const MatrixXd z = forward(ptrs, ks, 0.0, nullptr, nullptr);
  const Index hw = static_cast<Index>(config_.side) * config_.side;
  std::vector<EntryProbs> out;
  out.reserve(xs.size());
  for (std::size_t b = 0; b < xs.size(); ++b) {
    EntryProbs p(config_.channels, hw);
    for (int ch = 0; ch < config_.channels; ++ch)
      for (Index j = 0; j < hw; ++j) {
        const Index col = static_cast<Index>(b) * hw + j;
        p(ch, j) = sigmoid(z(2 * ch + 1, col) - z(2 * ch, col));
      }
    out.push_back(std::move(p));
  }
  return out;
}

EntryProbs ConvDenoiser::predict(const TopologyTensor& xk, int k) const {
  return predict_batch({&xk, 1}, {&k, 1}).front();
}

double ConvDenoiser::loss(std::span<const TrainingExample> batch, const Schedule& schedule,
                          double lambda, VectorXd* gradient, double dropout,
                          Philox* dropout_rng) const {
  if (batch.empty()) throw ContractError("empty batch");
  if (lambda < 0) throw ParameterError("lambda must be non-negative");
  const ConvConfig& c = config_;
  const Index hw = static_cast<Index>(c.side) * c.side;
  const Index n = static_cast<Index>(batch.size());
  std::vector<const TopologyTensor*> inputs;
  std::vector<int> ks;
  for (const auto& ex : batch) {
    if (!ex.clean || ex.clean->channels != ex.noisy.channels || ex.clean->side != ex.noisy.side)
      throw ContractError("training example has inconsistent tensors");
    inputs.push_back(&ex.noisy);
    ks.push_back(ex.step);
  }
  Cache cache;
  const MatrixXd z = forward(inputs, ks, dropout, dropout_rng, gradient ? &cache : nullptr);

  const double scale = 1.0 / static_cast<double>(n * hw * c.channels);
  MatrixXd dz = MatrixXd::Zero(z.rows(), z.cols());
  double total = 0.0;
  for (Index b = 0; b < n; ++b) {
    const TrainingExample& ex = batch[b];
    const int k = ex.step;
    // posterior(x_k, d) for both x_k and both candidate clean states d.
    Row2<double> post[2][2];
    for (int xk = 0; xk < 2; ++xk)
      for (int d = 0; d < 2; ++d) post[xk][d] = posterior(xk, d, schedule, k);
    for (int ch = 0; ch < c.channels; ++ch) {
      for (Index j = 0; j < hw; ++j) {
        const Index col = b * hw + j;
        const int x0 = ex.clean->data(ch, j);
        const int xk = ex.noisy.data(ch, j);
        const double p1 = sigmoid(z(2 * ch + 1, col) - z(2 * ch, col));
        const Row2<double> p(1.0 - p1, p1);
        const Row2<double>& q = post[xk][x0];
        const Row2<double> r = p(0) * post[xk][0] + p(1) * post[xk][1];
        double dp[2] = {0.0, 0.0};
        for (int s = 0; s < 2; ++s) {
          if (q(s) <= 0) continue;
          const double rs = std::max(r(s), kProbabilityFloor);
          total += q(s) * (std::log(std::max(q(s), kProbabilityFloor)) - std::log(rs));
          if (r(s) > kProbabilityFloor) {
            const double g = -q(s) / r(s);
            dp[0] += g * post[xk][0](s);
            dp[1] += g * post[xk][1](s);
          }
        }
        total -= lambda * std::log(std::max(p(x0), kProbabilityFloor));
        if (p(x0) > kProbabilityFloor) dp[x0] -= lambda / p(x0);
        const double mean = p(0) * dp[0] + p(1) * dp[1];
        dz(2 * ch, col) = scale * p(0) * (dp[0] - mean);
        dz(2 * ch + 1, col) = scale * p(1) * (dp[1] - mean);
      }
    }
  }
  const double value = total * scale;
  if (!gradient) return value;

  gradient->setZero(theta_.size());
  auto G = [&](int g) {
    const ParameterGroup& p = groups_[g];
    return Eigen::Map<MatrixXd>(gradient->data() + p.offset, p.rows, p.cols);
  };
  auto W = [&](int g) {
    const ParameterGroup& p = groups_[g];
    return Eigen::Map<const MatrixXd>(theta_.data() + p.offset, p.rows, p.cols);
  };

  const int head = static_cast<int>(groups_.size()) - 2;
  G(head).noalias() = dz * cache.cols_head.transpose();
  G(head + 1) = dz.rowwise().sum();
  MatrixXd dh = col2im(W(head).transpose() * dz, c.width, c.side)
                    .cwiseProduct(silu_grad(cache.h.back()));

  for (int blk = c.blocks - 1; blk >= 0; --blk) {
    const MatrixXd& dz2 = dh;
    G(block_group(blk, 4)).noalias() = dz2 * cache.cols2[blk].transpose();
    G(block_group(blk, 5)) = dz2.rowwise().sum();
    MatrixXd da2 = col2im(W(block_group(blk, 4)).transpose() * dz2, c.width, c.side);
    if (cache.mask[blk].size() > 0) da2.array() *= cache.mask[blk].array();
    const MatrixXd dz1 = da2.cwiseProduct(silu_grad(cache.z1[blk]));
    G(block_group(blk, 0)).noalias() = dz1 * cache.cols1[blk].transpose();
    G(block_group(blk, 1)) = dz1.rowwise().sum();
    MatrixXd dtime(c.width, n);
    for (Index b = 0; b < n; ++b) dtime.col(b) = dz1.middleCols(b * hw, hw).rowwise().sum();
    G(block_group(blk, 2)).noalias() = dtime * cache.embed.transpose();
    G(block_group(blk, 3)) = dtime.rowwise().sum();
    const MatrixXd da1 = col2im(W(block_group(blk, 0)).transpose() * dz1, c.width, c.side);
    dh += da1.cwiseProduct(silu_grad(cache.h[blk]));
  }
  G(kInW).noalias() = dh * cache.cols_in.transpose();
  G(kInB) = dh.rowwise().sum();
  return value;
}

TrainResult train(std::span<const TopologyTensor> dataset, const Schedule& schedule,
                  const TrainConfig& config, const ConvConfig& model_config,
                  const std::function<void(long, double)>& on_iteration) {
  validate(config);
  if (dataset.empty()) throw ConfigurationError("training dataset is empty");
  for (const auto& t : dataset)
    if (t.channels != model_config.channels || t.side != model_config.side)
      throw ShapeError("dataset tensor shape does not match the denoiser configuration");

  TrainResult result{ConvDenoiser(model_config, config.seed), {}};
  ConvDenoiser& model = result.model;
  const Index size = model.parameters().size();
  VectorXd m = VectorXd::Zero(size), v = VectorXd::Zero(size), grad(size);
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double beta1_t = 1.0, beta2_t = 1.0;

  std::vector<TrainingExample> batch(config.batch_size);
  result.loss_trace.reserve(config.iterations);
  for (long it = 1; it <= config.iterations; ++it) {
    // Stream 0 is the parameter initialisation; iteration it uses stream it.
    Philox rng = Philox::derive(config.seed, static_cast<std::uint64_t>(it));
    for (auto& ex : batch) {
      ex.clean = &dataset[rng.below(dataset.size())];
      ex.step = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(schedule.steps())));
      ex.noisy = forward_sample(*ex.clean, schedule, ex.step, rng);
    }
    const double value = model.loss(batch, schedule, config.lambda, &grad, config.dropout, &rng);
    if (!std::isfinite(value) || !grad.allFinite())
      throw TrainingError(it, "training diverged at iteration " + std::to_string(it));
    const double norm = grad.norm();
    if (norm > config.grad_clip) grad *= config.grad_clip / norm;

    beta1_t *= beta1;
    beta2_t *= beta2;
    m = beta1 * m + (1.0 - beta1) * grad;
    v = beta2 * v + (1.0 - beta2) * grad.cwiseAbs2();
    const double step = config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
    model.parameters().array() -= step * m.array() / (v.array().sqrt() + eps);

    result.loss_trace.push_back(value);
    if (on_iteration) on_iteration(it, value);
  }
  return result;
}

namespace {

constexpr char kMagic[8] = {'S', 'Q', 'D', 'F', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T)))
    throw ValidationError("checkpoint: truncated file");
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ConvDenoiser& model,
                     const std::string& config_echo) {
  static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out.write(kMagic, sizeof(kMagic));
  put(out, kVersion);
  const ConvConfig& c = model.config();
  for (int v : {c.channels, c.side, c.width, c.blocks, c.embed_dim}) put(out, static_cast<std::int32_t>(v));
  put(out, static_cast<std::uint64_t>(model.parameters().size()));
  out.write(reinterpret_cast<const char*>(model.parameters().data()),
            static_cast<std::streamsize>(model.parameters().size() * sizeof(double)));
  put(out, static_cast<std::uint64_t>(config_echo.size()));
  out.write(config_echo.data(), static_cast<std::streamsize>(config_echo.size()));
  if (!out) throw ValidationError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw ValidationError("checkpoint: bad magic in " + path.string());
  if (get<std::uint32_t>(in) != kVersion) throw ValidationError("checkpoint: unsupported version");
  ConvConfig c;
  c.channels = get<std::int32_t>(in);
  c.side = get<std::int32_t>(in);
  c.width = get<std::int32_t>(in);
  c.blocks = get<std::int32_t>(in);
  c.embed_dim = get<std::int32_t>(in);
  const auto count = get<std::uint64_t>(in);
  const auto layout = conv_parameter_layout(c);
  if (count != static_cast<std::uint64_t>(layout.back().offset + layout.back().size()))
    throw ValidationError("checkpoint: parameter count does not match the stored shape");
  VectorXd theta(static_cast<Index>(count));
  if (!in.read(reinterpret_cast<char*>(theta.data()),
               static_cast<std::streamsize>(count * sizeof(double))))
    throw ValidationError("checkpoint: truncated parameters");
  const auto echo_len = get<std::uint64_t>(in);
  std::string echo(echo_len, '\0');
  if (echo_len && !in.read(echo.data(), static_cast<std::streamsize>(echo_len)))
    throw ValidationError("checkpoint: truncated configuration echo");
  return {ConvDenoiser(c, std::move(theta)), std::move(echo)};
}

}  // namespace squishdiff
