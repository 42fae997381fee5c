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

#include "squishdiff/config.hpp"

#include "squishdiff/errors.hpp"
#include "squishdiff/rules.hpp"
#include "squishdiff/squish_io.hpp"

#include <json.hpp>

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

namespace squishdiff {

void validate(const RuleSet& r) {
  if (r.space_min <= 0 || r.width_min <= 0 || r.area_min <= 0 || r.area_max <= 0 || r.window <= 0)
    throw ValidationError("design rules must be positive");
  if (r.area_min > r.area_max) throw ValidationError("area_min exceeds area_max");
  if (r.space_min > r.window || r.width_min > r.window)
    throw ValidationError("space_min and width_min must not exceed the window");
}

RuleSet rules_from_json(const std::string& text) {
  RuleSet r;
  try {
    const auto doc = nlohmann::json::parse(text);
    r.space_min = doc.at("space_min").get<Coord>();
    r.width_min = doc.at("width_min").get<Coord>();
    r.area_min = doc.at("area_min").get<Coord>();
    r.area_max = doc.at("area_max").get<Coord>();
    r.window = doc.at("window").get<Coord>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rules JSON: ") + e.what());
  }
  validate(r);
  return r;
}

std::string rules_to_json(const RuleSet& r) {
  nlohmann::json doc = {{"space_min", r.space_min}, {"width_min", r.width_min},
                        {"area_min", r.area_min},   {"area_max", r.area_max},
                        {"window", r.window}};
  return doc.dump(2) + "\n";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& value, int line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigurationError("config line " + std::to_string(line) + ": bad number '" + value + "'");
  return out;
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig c;
  using Setter = std::function<void(const std::string&, int)>;
  auto num = [](auto& field) {
    return Setter([&field](const std::string& v, int line) {
      field = parse_number<std::remove_reference_t<decltype(field)>>(v, line);
    });
  };
  auto path = [](std::filesystem::path& field) {
    return Setter([&field](const std::string& v, int) { field = v; });
  };
  const std::map<std::string, Setter> setters = {
      {"dataset_dir", path(c.dataset_dir)},   {"checkpoint", path(c.checkpoint)},
      {"rules_file", path(c.rules_file)},     {"delta_library", path(c.delta_library)},
      {"output_dir", path(c.output_dir)},     {"K", num(c.K)},
      {"beta_1", num(c.beta_1)},              {"beta_K", num(c.beta_K)},
      {"lambda", num(c.lambda)},              {"C", num(c.C)},
      {"M", num(c.M)},                        {"lr", num(c.lr)},
      {"batch", num(c.batch)},                {"iters", num(c.iters)},
      {"clip", num(c.clip)},                  {"dropout", num(c.dropout)},
      {"width", num(c.width)},                {"blocks", num(c.blocks)},
      {"seed", num(c.seed)},                  {"workers", num(c.workers)},
  };
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw ConfigurationError("config line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(content.substr(0, eq));
    const std::string value = trim(content.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigurationError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    it->second(value, line);
  }
  validate(c);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_file(path));
}

void validate(const RunConfig& c) {
  if (c.K < 1) throw ConfigurationError("K must be at least 1");
  if (!(c.beta_1 > 0 && c.beta_1 <= c.beta_K && c.beta_K < 1))
    throw ConfigurationError("need 0 < beta_1 <= beta_K < 1");
  if (c.C < 1 || c.M < 1) throw ConfigurationError("C and M must be positive");
  if (c.width < 1 || c.blocks < 0) throw ConfigurationError("bad model width/blocks");
  if (c.workers < 1) throw ConfigurationError("workers must be at least 1");
  validate(c.train_config());
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.learning_rate = lr;
  t.batch_size = batch;
  t.iterations = iters;
  t.grad_clip = clip;
  t.dropout = dropout;
  t.lambda = lambda;
  t.seed = seed;
  return t;
}

ConvConfig RunConfig::model_config() const {
  ConvConfig m;
  m.channels = C;
  m.side = M;
  m.width = width;
  m.blocks = blocks;
  return m;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "dataset_dir = " << c.dataset_dir.string() << "\n"
      << "checkpoint = " << c.checkpoint.string() << "\n"
      << "rules_file = " << c.rules_file.string() << "\n"
      << "delta_library = " << c.delta_library.string() << "\n"
      << "output_dir = " << c.output_dir.string() << "\n"
      << "K = " << c.K << "\n"
      << "beta_1 = " << c.beta_1 << "\n"
      << "beta_K = " << c.beta_K << "\n"
      << "lambda = " << c.lambda << "\n"
      << "C = " << c.C << "\n"
      << "M = " << c.M << "\n"
      << "lr = " << c.lr << "\n"
      << "batch = " << c.batch << "\n"
      << "iters = " << c.iters << "\n"
      << "clip = " << c.clip << "\n"
      << "dropout = " << c.dropout << "\n"
      << "width = " << c.width << "\n"
      << "blocks = " << c.blocks << "\n"
      << "seed = " << c.seed << "\n"
      << "workers = " << c.workers << "\n";
  return out.str();
}

}  // namespace squishdiff
