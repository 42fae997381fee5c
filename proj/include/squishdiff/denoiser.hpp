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

#pragma once

#include "squishdiff/diffusion.hpp"
#include "squishdiff/rng.hpp"
#include "squishdiff/types.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace squishdiff {

/// Exact Bayes denoiser over an enumerable dataset:
///   p(x~_0 = d | T_k) proportional to prior(d) * prod_e q(T_k[e] | d[e]).
/// Used as test-time ground truth for the sampler.
class OracleDenoiser final : public Denoiser {
 public:
  /// Uniform priors.
  OracleDenoiser(std::vector<TopologyTensor> dataset, Schedule schedule);
  OracleDenoiser(std::vector<TopologyTensor> dataset, std::vector<double> priors,
                 Schedule schedule);

  EntryProbs predict(const TopologyTensor& xk, int k) const override;

  /// Posterior weight of every dataset member given the noisy tensor.
  Eigen::VectorXd pattern_posterior(const TopologyTensor& xk, int k) const;

  const std::vector<TopologyTensor>& dataset() const { return dataset_; }

 private:
  std::vector<TopologyTensor> dataset_;
  Eigen::VectorXd log_prior_;
  Schedule schedule_;
};

/// Shape of the desk-scale convolutional denoiser.
struct ConvConfig {
  int channels = 16;    // C
  int side = 32;        // M
  int width = 64;       // hidden channels W
  int blocks = 4;       // residual blocks D
  int embed_dim = 64;   // sinusoidal step embedding size (even)
};

struct TrainConfig {
  double learning_rate = 2e-4;
  int batch_size = 128;
  long iterations = 1000;
  double grad_clip = 1.0;
  double dropout = 0.1;
  double lambda = 0.001;
  std::uint64_t seed = 0;
};

void validate(const TrainConfig& config);

/// Named slice of the flat parameter vector.
struct ParameterGroup {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Eigen::Index offset = 0;
  Eigen::Index size() const { return rows * cols; }
};

/// One noisy training example.
struct TrainingExample {
  const TopologyTensor* clean = nullptr;
  TopologyTensor noisy;
  int step = 1;
};

/// Time-conditioned residual CNN at full resolution:
///
///   h = conv3x3(2x - 1)
///   D times: h += conv3x3(dropout(silu(conv3x3(silu(h)) + A_b e(k) + a_b)))
///   logits = conv3x3(silu(h))           (2 logits per channel entry)
///
/// where e(k) is the sinusoidal embedding of step k. All parameters live in
/// one flat vector; groups() describes its layout.
class ConvDenoiser final : public Denoiser {
 public:
  ConvDenoiser() = default;

  /// Fan-in scaled random weights, zero biases, zero output head.
  ConvDenoiser(const ConvConfig& config, std::uint64_t seed);

  /// Wraps an existing parameter vector (e.g. from a checkpoint).
  ConvDenoiser(const ConvConfig& config, Eigen::VectorXd parameters);

  const ConvConfig& config() const { return config_; }
  const std::vector<ParameterGroup>& groups() const { return groups_; }
  const Eigen::VectorXd& parameters() const { return theta_; }
  Eigen::VectorXd& parameters() { return theta_; }

  EntryProbs predict(const TopologyTensor& xk, int k) const override;
  std::vector<EntryProbs> predict_batch(std::span<const TopologyTensor> xs,
                                        std::span<const int> ks) const override;

  /// Mean per-entry loss over the batch. When `gradient` is non-null it is
  /// resized and filled with d(loss)/d(parameters). A non-null `dropout_rng`
  /// with dropout > 0 enables dropout masks.
  double loss(std::span<const TrainingExample> batch, const Schedule& schedule, double lambda,
              Eigen::VectorXd* gradient = nullptr, double dropout = 0.0,
              Philox* dropout_rng = nullptr) const;

  /// Raw logits, 2C rows (state-0 then state-1 logit per channel) by M*M columns.
  Eigen::MatrixXd logits(const TopologyTensor& xk, int k) const;

  Eigen::VectorXd step_embedding(int k) const;

 private:
  struct Cache;
  Eigen::MatrixXd forward(std::span<const TopologyTensor* const> xs, std::span<const int> ks,
                          double dropout, Philox* rng, Cache* cache) const;

  ConvConfig config_;
  std::vector<ParameterGroup> groups_;
  Eigen::VectorXd theta_;
};

std::vector<ParameterGroup> conv_parameter_layout(const ConvConfig& config);

struct TrainResult {
  ConvDenoiser model;
  std::vector<double> loss_trace;
};

/// Gradient descent with Adam moments and global-norm clipping. Each
/// iteration samples a batch with replacement, a step k ~ U{1..K} per
/// example and T_k ~ q(T_k | T_0). Throws TrainingError on a non-finite loss.
TrainResult train(std::span<const TopologyTensor> dataset, const Schedule& schedule,
                  const TrainConfig& config, const ConvConfig& model_config,
                  const std::function<void(long, double)>& on_iteration = {});

/// Checkpoint layout (little-endian):
///   8 bytes  magic "SQDFCKPT"
///   u32      version (1)
///   5 x i32  channels, side, width, blocks, embed_dim
///   u64      parameter count P
///   P x f64  parameters
///   u64      length L of the configuration echo
///   L bytes  configuration echo (key = value lines)
void save_checkpoint(const std::filesystem::path& path, const ConvDenoiser& model,
                     const std::string& config_echo);

struct Checkpoint {
  ConvDenoiser model;
  std::string config_echo;
};
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace squishdiff
