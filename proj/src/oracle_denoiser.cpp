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

namespace squishdiff {

namespace {

std::vector<double> uniform_priors(std::size_t n) {
  return std::vector<double>(n, n == 0 ? 0.0 : 1.0 / static_cast<double>(n));
}

}  // namespace

OracleDenoiser::OracleDenoiser(std::vector<TopologyTensor> dataset, Schedule schedule)
    : OracleDenoiser(dataset, uniform_priors(dataset.size()), std::move(schedule)) {}

OracleDenoiser::OracleDenoiser(std::vector<TopologyTensor> dataset, std::vector<double> priors,
                               Schedule schedule)
    : dataset_(std::move(dataset)), schedule_(std::move(schedule)) {
  if (dataset_.empty()) throw ConfigurationError("oracle denoiser needs a non-empty dataset");
  if (priors.size() != dataset_.size())
    throw ConfigurationError("one prior weight per dataset member is required");
  double total = 0.0;
  for (double w : priors) {
    if (!(w > 0.0)) throw ConfigurationError("prior weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigurationError("prior weights must sum to 1");
  for (const auto& t : dataset_)
    if (t.channels != dataset_[0].channels || t.side != dataset_[0].side)
      throw ShapeError("dataset tensors differ in shape");
  log_prior_.resize(static_cast<Eigen::Index>(priors.size()));
  for (std::size_t i = 0; i < priors.size(); ++i) log_prior_(i) = std::log(priors[i]);
}

Eigen::VectorXd OracleDenoiser::pattern_posterior(const TopologyTensor& xk, int k) const {
  const TopologyTensor& ref = dataset_.front();
  if (xk.channels != ref.channels || xk.side != ref.side)
    throw ShapeError("noisy tensor shape does not match the dataset");
  const Matrix2<double>& qbar = schedule_.cumulative(k);
  Matrix2<double> log_q = qbar.array().log().matrix();
  Eigen::VectorXd log_post = log_prior_;
  for (std::size_t d = 0; d < dataset_.size(); ++d) {
    const auto& clean = dataset_[d].data;
    double ll = 0.0;
    for (Eigen::Index e = 0; e < clean.size(); ++e) ll += log_q(clean(e), xk.data(e));
    log_post(static_cast<Eigen::Index>(d)) += ll;
  }
  const double top = log_post.maxCoeff();
  Eigen::VectorXd post = (log_post.array() - top).exp().matrix();
  return post / post.sum();
}

EntryProbs OracleDenoiser::predict(const TopologyTensor& xk, int k) const {
  const Eigen::VectorXd post = pattern_posterior(xk, k);
  EntryProbs p1 = EntryProbs::Zero(xk.data.rows(), xk.data.cols());
  for (std::size_t d = 0; d < dataset_.size(); ++d)
    p1 += post(static_cast<Eigen::Index>(d)) * dataset_[d].data.cast<double>();
  return p1.cwiseMin(1.0);
}

}  // namespace squishdiff
