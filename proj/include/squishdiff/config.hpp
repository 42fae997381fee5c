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

#include "squishdiff/denoiser.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace squishdiff {

/// Batch run configuration, read from a key-value text file:
///
///   # comment
///   K = 1000
///   beta_1 = 0.01
///
/// One `key = value` per line; blank lines and `#` comments are ignored and
/// unknown keys are rejected with the offending line number.
struct RunConfig {
  std::filesystem::path dataset_dir;
  std::filesystem::path checkpoint;
  std::filesystem::path rules_file;
  std::filesystem::path delta_library;
  std::filesystem::path output_dir = "out";

  int K = 1000;
  double beta_1 = 0.01;
  double beta_K = 0.5;
  double lambda = 0.001;
  int C = 16;
  int M = 32;

  double lr = 2e-4;
  int batch = 128;
  long iters = 1000;
  double clip = 1.0;
  double dropout = 0.1;
  int width = 64;
  int blocks = 4;

  std::uint64_t seed = 0;
  unsigned workers = 1;

  TrainConfig train_config() const;
  ConvConfig model_config() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_text(const RunConfig& config);

/// Throws ConfigurationError for out-of-range values.
void validate(const RunConfig& config);

}  // namespace squishdiff
