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

#include "squishdiff/diffusion.hpp"

#include "squishdiff/parallel.hpp"

namespace squishdiff {

namespace {

void check_same_shape(const TopologyTensor& a, const TopologyTensor& b) {
  if (a.channels != b.channels || a.side != b.side)
    throw ShapeError("tensor shapes differ");
}

int draw(const Row2<double>& p, Philox& rng) { return rng.uniform() < p(1) ? 1 : 0; }

}  // namespace

double vlb_loss(const TopologyTensor& x0, const TopologyTensor& xk, const EntryProbs& p_clean_one,
                const Schedule& schedule, int k, double lambda) {
  check_same_shape(x0, xk);
  if (p_clean_one.rows() != x0.data.rows() || p_clean_one.cols() != x0.data.cols())
    throw ShapeError("probability map does not match tensor shape");
  double total = 0.0;
  for (Eigen::Index i = 0; i < x0.data.size(); ++i) {
    const double p1 = p_clean_one(i);
    total += entry_loss<double>(x0.data(i), xk.data(i), Row2<double>(1.0 - p1, p1), schedule, k,
                                lambda);
  }
  return total / static_cast<double>(x0.data.size());
}

TopologyTensor forward_sample(const TopologyTensor& x0, const Schedule& schedule, int k,
                              Philox& rng) {
  if (k < 1) throw ParameterError("forward_sample needs k >= 1");
  const Matrix2<double>& qbar = schedule.cumulative(k);
  TopologyTensor out(x0.channels, x0.side);
  for (Eigen::Index i = 0; i < x0.data.size(); ++i)
    out.data(i) = static_cast<std::uint8_t>(draw(qbar.row(check_state(x0.data(i))), rng));
  return out;
}

TopologyTensor forward_sample(const TopologyTensor& x0, const Schedule& schedule, int k,
                              std::uint64_t seed) {
  Philox rng(seed);
  return forward_sample(x0, schedule, k, rng);
}

std::vector<EntryProbs> Denoiser::predict_batch(std::span<const TopologyTensor> xs,
                                                std::span<const int> ks) const {
  if (xs.size() != ks.size()) throw ShapeError("batch sizes differ");
  std::vector<EntryProbs> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(predict(xs[i], ks[i]));
  return out;
}

std::vector<TopologyTensor> sample_topologies(const Denoiser& denoiser, const Schedule& schedule,
                                              std::size_t count, const SampleOptions& options) {
  if (options.channels <= 0 || options.side <= 0) throw ParameterError("bad sample shape");
  const std::size_t batch = std::max<std::size_t>(1, options.batch);
  const std::size_t chunks = (count + batch - 1) / batch;
  const int steps = schedule.steps();
  std::vector<TopologyTensor> out(count);

  parallel_for(chunks, options.workers, [&](std::size_t chunk) {
    const std::size_t begin = chunk * batch;
    const std::size_t end = std::min(count, begin + batch);
    const std::size_t n = end - begin;
    std::vector<Philox> streams;
    std::vector<TopologyTensor> state;
    for (std::size_t i = begin; i < end; ++i) {
      streams.push_back(Philox::derive(options.root_seed, options.first_index + i));
      TopologyTensor t(options.channels, options.side);
      for (Eigen::Index e = 0; e < t.data.size(); ++e)
        t.data(e) = static_cast<std::uint8_t>(streams.back()() >> 63);
      state.push_back(std::move(t));
    }
    for (int k = steps; k >= 1; --k) {
      const std::vector<int> ks(n, k);
      const std::vector<EntryProbs> probs = denoiser.predict_batch(state, ks);
      for (std::size_t b = 0; b < n; ++b) {
        TopologyTensor& t = state[b];
        if (probs[b].rows() != t.data.rows() || probs[b].cols() != t.data.cols())
          throw ShapeError("denoiser output shape mismatch");
        for (Eigen::Index e = 0; e < t.data.size(); ++e) {
          const double p1 = probs[b](e);
          if (k == 1) {
            t.data(e) = static_cast<std::uint8_t>(streams[b].uniform() < p1 ? 1 : 0);
          } else {
            const Row2<double> r =
                reverse_distribution<double>(t.data(e), Row2<double>(1.0 - p1, p1), schedule, k);
            t.data(e) = static_cast<std::uint8_t>(draw(r, streams[b]));
          }
        }
      }
    }
    for (std::size_t b = 0; b < n; ++b) out[begin + b] = std::move(state[b]);
  });
  return out;
}

TopologyTensor sample_topology(const Denoiser& denoiser, const Schedule& schedule, int channels,
                               int side, std::uint64_t seed) {
  SampleOptions options;
  options.channels = channels;
  options.side = side;
  options.root_seed = seed;
  return sample_topologies(denoiser, schedule, 1, options).front();
}

}  // namespace squishdiff
