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

#include "squishdiff/errors.hpp"
#include "squishdiff/rng.hpp"
#include "squishdiff/types.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace squishdiff {

// Two-state (space / shape) discrete diffusion. A one-hot state x is carried
// as its index 0 or 1, so x * Q is simply row x of Q.

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Row2 = Eigen::Matrix<Scalar, 1, 2>;

/// Floor applied inside logarithms and KL terms.
inline constexpr double kProbabilityFloor = 1e-12;

template <typename Scalar>
Matrix2<Scalar> transition_matrix(Scalar beta) {
  if (!(beta > Scalar(0) && beta < Scalar(1)))
    throw ParameterError("beta must lie in (0, 1), got " + std::to_string(double(beta)));
  Matrix2<Scalar> q;
  q << Scalar(1) - beta, beta, beta, Scalar(1) - beta;
  return q;
}

/// Noise levels beta_1..beta_K with the per-step transition matrices Q_k and
/// their running products Q_bar_k = Q_1 Q_2 ... Q_k. Q_bar_0 is the identity.
template <typename Scalar = double>
class DiffusionSchedule {
 public:
  explicit DiffusionSchedule(std::vector<Scalar> betas) : beta_(std::move(betas)) {
    if (beta_.empty()) throw ParameterError("schedule needs at least one step");
    q_.reserve(beta_.size());
    q_bar_.reserve(beta_.size() + 1);
    q_bar_.push_back(Matrix2<Scalar>::Identity());
    for (Scalar b : beta_) {
      q_.push_back(transition_matrix(b));
      q_bar_.push_back(q_bar_.back() * q_.back());
    }
  }

  int steps() const { return static_cast<int>(beta_.size()); }

  Scalar beta(int k) const { return beta_.at(check_step(k, 1) - 1); }
  const std::vector<Scalar>& betas() const { return beta_; }

  const Matrix2<Scalar>& transition(int k) const { return q_[check_step(k, 1) - 1]; }

  /// Q_bar_k for k in [0, K].
  const Matrix2<Scalar>& cumulative(int k) const { return q_bar_[check_step(k, 0)]; }

 private:
  int check_step(int k, int lowest) const {
    if (k < lowest || k > steps())
      throw ParameterError("step " + std::to_string(k) + " outside [" + std::to_string(lowest) +
                           ", " + std::to_string(steps()) + "]");
    return k;
  }

  std::vector<Scalar> beta_;
  std::vector<Matrix2<Scalar>> q_;
  std::vector<Matrix2<Scalar>> q_bar_;
};

using Schedule = DiffusionSchedule<double>;

/// Linear schedule beta_k = (k-1)(beta_K - beta_1)/(K-1) + beta_1.
template <typename Scalar = double>
DiffusionSchedule<Scalar> make_schedule(int steps, Scalar beta_first, Scalar beta_last) {
  if (steps < 1) throw ParameterError("K must be at least 1");
  if (!(beta_first > Scalar(0) && beta_first <= beta_last && beta_last < Scalar(1)))
    throw ParameterError("need 0 < beta_1 <= beta_K < 1");
  std::vector<Scalar> betas(steps);
  for (int k = 1; k <= steps; ++k)
    betas[k - 1] = steps == 1 ? beta_first
                              : Scalar(k - 1) * (beta_last - beta_first) / Scalar(steps - 1) +
                                    beta_first;
  return DiffusionSchedule<Scalar>(std::move(betas));
}

inline int check_state(int x) {
  if (x != 0 && x != 1) throw ParameterError("state must be 0 or 1");
  return x;
}

/// q(x_k | x_0) = x_0 Q_bar_k.
template <typename Scalar>
Row2<Scalar> forward_marginal(int x0, const DiffusionSchedule<Scalar>& schedule, int k) {
  if (k < 1) throw ParameterError("forward_marginal needs k >= 1");
  return schedule.cumulative(k).row(check_state(x0));
}

/// q(x_{k-1} | x_k, x_0) = (x_k Q_k^T) .* (x_0 Q_bar_{k-1}) / (x_0 Q_bar_k x_k^T).
/// At k = 1 this is the point mass at x_0.
template <typename Scalar>
Row2<Scalar> posterior(int xk, int x0, const DiffusionSchedule<Scalar>& schedule, int k) {
  check_state(xk);
  check_state(x0);
  const Matrix2<Scalar>& q = schedule.transition(k);
  const Scalar denom = schedule.cumulative(k)(x0, xk);
  if (!(denom > Scalar(0))) throw ContractError("posterior normaliser is not positive");
  Row2<Scalar> p = q.col(xk).transpose().cwiseProduct(schedule.cumulative(k - 1).row(x0));
  return p / denom;
}

/// p(x_{k-1} | x_k) = sum over x~_0 of q(x_{k-1} | x_k, x~_0) p(x~_0 | x_k).
template <typename Scalar>
Row2<Scalar> reverse_distribution(int xk, const Row2<Scalar>& denoiser_probs,
                                  const DiffusionSchedule<Scalar>& schedule, int k) {
  using std::abs;
  if ((denoiser_probs.array() < Scalar(0)).any() ||
      abs(denoiser_probs.sum() - Scalar(1)) > Scalar(1e-6))
    throw ContractError("denoiser probabilities must be a normalised distribution");
  return denoiser_probs(0) * posterior(xk, 0, schedule, k) +
         denoiser_probs(1) * posterior(xk, 1, schedule, k);
}

/// KL(p || q) in nats with the probability floor applied to both arguments.
template <typename Scalar>
Scalar kl_divergence(const Row2<Scalar>& p, const Row2<Scalar>& q) {
  using std::log;
  using std::max;
  Scalar kl(0);
  for (int j = 0; j < 2; ++j) {
    if (p(j) <= Scalar(0)) continue;
    const Scalar pj = max(p(j), Scalar(kProbabilityFloor));
    const Scalar qj = max(q(j), Scalar(kProbabilityFloor));
    kl += p(j) * (log(pj) - log(qj));
  }
  return kl;
}

/// Per-entry training loss
///   KL(q(x_{k-1} | x_k, x_0) || p(x_{k-1} | x_k)) - lambda log p(x~_0 = x_0 | x_k).
template <typename Scalar>
Scalar entry_loss(int x0, int xk, const Row2<Scalar>& denoiser_probs,
                  const DiffusionSchedule<Scalar>& schedule, int k, Scalar lambda) {
  using std::log;
  using std::max;
  if (lambda < Scalar(0)) throw ParameterError("lambda must be non-negative");
  const Row2<Scalar> target = posterior(xk, x0, schedule, k);
  const Row2<Scalar> model = reverse_distribution(xk, denoiser_probs, schedule, k);
  return kl_divergence(target, model) -
         lambda * log(max(denoiser_probs(x0), Scalar(kProbabilityFloor)));
}

/// Per-entry probability that the clean state is 1, stored like
/// TopologyTensor::data (C rows, M*M columns).
using EntryProbs = Eigen::MatrixXd;

/// Loss for one tensor, averaged over its entries.
double vlb_loss(const TopologyTensor& x0, const TopologyTensor& xk, const EntryProbs& p_clean_one,
                const Schedule& schedule, int k, double lambda);

/// Draws every entry independently from q(x_k | x_0).
TopologyTensor forward_sample(const TopologyTensor& x0, const Schedule& schedule, int k,
                              Philox& rng);
TopologyTensor forward_sample(const TopologyTensor& x0, const Schedule& schedule, int k,
                              std::uint64_t seed);

/// Predicts p(x~_0 | x_k) for every entry. Implementations must be safe to
/// call concurrently through the const interface.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual EntryProbs predict(const TopologyTensor& xk, int k) const = 0;

  /// Batched prediction; the default forwards to predict() one by one.
  virtual std::vector<EntryProbs> predict_batch(std::span<const TopologyTensor> xs,
                                                std::span<const int> ks) const;
};

struct SampleOptions {
  int channels = 16;
  int side = 32;
  std::uint64_t root_seed = 0;
  /// Index of the first pattern; pattern i draws from Philox::derive(root_seed, i).
  std::uint64_t first_index = 0;
  unsigned workers = 1;
  std::size_t batch = 64;
};

/// Ancestral sampling: T_K uniform, T_{k-1} ~ p(. | T_k) for k = K..2, then
/// T_0 drawn from the denoiser's p(x~_0 | T_1). Output depends only on the
/// denoiser, schedule, shape and per-pattern stream, not on workers or batch.
std::vector<TopologyTensor> sample_topologies(const Denoiser& denoiser, const Schedule& schedule,
                                              std::size_t count, const SampleOptions& options);

TopologyTensor sample_topology(const Denoiser& denoiser, const Schedule& schedule, int channels,
                               int side, std::uint64_t seed);

}  // namespace squishdiff
