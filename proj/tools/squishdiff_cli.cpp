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

// squishdiff command-line front end.
//
// Exit codes: 0 success, 2 invalid input or configuration, 3 no topology in a
// legalize batch could be solved, 4 training diverged, 1 anything else.

#include "squishdiff/config.hpp"
#include "squishdiff/denoiser.hpp"
#include "squishdiff/drc.hpp"
#include "squishdiff/errors.hpp"
#include "squishdiff/legalizer.hpp"
#include "squishdiff/metrics.hpp"
#include "squishdiff/parallel.hpp"
#include "squishdiff/render.hpp"
#include "squishdiff/squish.hpp"
#include "squishdiff/squish_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace squishdiff;
using Clock = std::chrono::steady_clock;

namespace {

enum Exit { kOk = 0, kFailure = 1, kInvalid = 2, kInfeasible = 3, kDiverged = 4 };

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

RunConfig load(const Globals& g) {
  RunConfig c;
  if (!g.config.empty()) {
    if (!fs::exists(g.config)) throw ConfigurationError("config file not found: " + g.config);
    c = load_run_config(g.config);
  }
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (!g.out.empty()) c.output_dir = g.out;
  validate(c);
  return c;
}

RuleSet load_rules(const RunConfig& c) {
  if (c.rules_file.empty()) return {};
  if (!fs::exists(c.rules_file)) throw ConfigurationError("rules file not found: " + c.rules_file.string());
  return rules_from_json(read_file(c.rules_file));
}

// Errors from parsing a file are re-thrown with the file name prefixed.
template <typename Fn>
auto with_file(const fs::path& path, Fn&& fn) {
  try {
    return fn(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

LayoutPattern read_layout(const fs::path& path) {
  return with_file(path, [](const std::string& t) {
    auto l = layout_from_json(t);
    validate_layout(l);
    return l;
  });
}

BinaryMatrix read_topology(const fs::path& path) {
  return with_file(path, [](const std::string& t) { return topology_from_text(t); });
}

fs::path deltas_path(const fs::path& topo) {
  fs::path p = topo;
  return p.replace_extension(".deltas");
}

SquishPattern read_squish(const fs::path& topo, const fs::path& deltas) {
  SquishPattern s;
  s.topology = read_topology(topo);
  std::tie(s.delta_x, s.delta_y) = with_file(deltas, [](const std::string& t) { return deltas_from_text(t); });
  try {
    validate_squish(s);
  } catch (const ValidationError& e) {
    throw ValidationError(topo.string() + ": " + e.what());
  }
  return s;
}

/// Layout JSON or topology text (with a sibling .deltas file) by extension.
LayoutPattern read_any_layout(const fs::path& path) {
  if (path.extension() == ".topo") return reconstruct_layout(read_squish(path, deltas_path(path)));
  return read_layout(path);
}

std::vector<fs::path> files_in(const fs::path& dir, const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw ConfigurationError("dataset directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() &&
        std::find(extensions.begin(), extensions.end(), entry.path().extension().string()) != extensions.end())
      out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

int side_of(const RunConfig& c) {
  const int root = static_cast<int>(std::lround(std::sqrt(double(c.C))));
  if (root * root != c.C) throw ConfigurationError("C must be a perfect square");
  return root * c.M;
}

/// Dataset tensors: layouts are encoded and padded, topology files are padded
/// when a .deltas sibling exists and must already be square otherwise.
std::vector<TopologyTensor> load_dataset(const RunConfig& c) {
  const int side = side_of(c);
  std::vector<TopologyTensor> out;
  for (const auto& path : files_in(c.dataset_dir, {".json", ".topo"})) {
    BinaryMatrix m;
    if (path.extension() == ".json") {
      m = pad_to_square(extract_squish(read_layout(path)), side).topology;
    } else if (fs::exists(deltas_path(path))) {
      m = pad_to_square(read_squish(path, deltas_path(path)), side).topology;
    } else {
      m = read_topology(path);
    }
    if (m.rows() != side || m.cols() != side)
      throw ShapeError(path.string() + ": topology is not " + std::to_string(side) + "x" + std::to_string(side));
    out.push_back(fold(m, c.C));
  }
  if (out.empty()) throw ConfigurationError("no .json or .topo files in " + c.dataset_dir.string());
  return out;
}

Schedule schedule_of(const RunConfig& c) { return make_schedule(c.K, c.beta_1, c.beta_K); }

fs::path checkpoint_path(const RunConfig& c) {
  return c.checkpoint.empty() ? c.output_dir / "model.ckpt" : c.checkpoint;
}

// ---------------------------------------------------------------------------

int cmd_encode(const Globals& g, const std::vector<std::string>& inputs, int pad) {
  const RunConfig c = load(g);
  for (const auto& in : inputs) {
    SquishPattern s = extract_squish(read_layout(in));
    if (pad > 0) s = pad_to_square(s, pad);
    const fs::path stem = c.output_dir / fs::path(in).stem();
    write_file(fs::path(stem).concat(".topo"), topology_to_text(s.topology));
    write_file(fs::path(stem).concat(".deltas"), deltas_to_text(s.delta_x, s.delta_y));
  }
  std::cout << "encoded " << inputs.size() << " layout(s) into " << c.output_dir << "\n";
  return kOk;
}

int cmd_decode(const Globals& g, const std::vector<std::string>& inputs) {
  const RunConfig c = load(g);
  for (const auto& in : inputs) {
    const LayoutPattern l = reconstruct_layout(read_squish(in, deltas_path(in)));
    write_file(c.output_dir / fs::path(in).stem().concat(".json"), layout_to_json(l));
  }
  std::cout << "decoded " << inputs.size() << " pattern(s) into " << c.output_dir << "\n";
  return kOk;
}

int cmd_train(const Globals& g) {
  const RunConfig c = load(g);
  const auto dataset = load_dataset(c);
  const auto schedule = schedule_of(c);
  std::ostringstream csv;
  csv.precision(17);
  csv << "iteration,loss\n";
  const long every = std::max(1L, c.iters / 20);
  const auto t0 = Clock::now();
  const auto result = train(dataset, schedule, c.train_config(), c.model_config(), [&](long it, double loss) {
    csv << it << ',' << loss << '\n';
    if (it % every == 0 || it == c.iters)
      std::fprintf(stderr, "iter %ld/%ld loss %.6g (%.1fs)\n", it, c.iters, loss, seconds_since(t0));
  });
  save_checkpoint(checkpoint_path(c), result.model, to_text(c));
  write_file(c.output_dir / "loss.csv", csv.str());
  std::cout << "trained on " << dataset.size() << " pattern(s); checkpoint " << checkpoint_path(c) << "\n";
  return kOk;
}

int cmd_sample(const Globals& g, std::size_t count, bool oracle) {
  const RunConfig c = load(g);
  const auto schedule = schedule_of(c);
  const auto t0 = Clock::now();
  std::unique_ptr<Denoiser> denoiser;
  if (oracle) {
    denoiser = std::make_unique<OracleDenoiser>(load_dataset(c), schedule);
  } else {
    const fs::path ckpt = checkpoint_path(c);
    if (!fs::exists(ckpt)) throw ConfigurationError("checkpoint not found: " + ckpt.string());
    auto loaded = load_checkpoint(ckpt);
    const ConvConfig have = loaded.model.config(), want = c.model_config();
    if (have.channels != want.channels || have.side != want.side || have.width != want.width ||
        have.blocks != want.blocks)
      throw ConfigurationError("checkpoint shape does not match the configuration (C, M, width, blocks)");
    denoiser = std::make_unique<ConvDenoiser>(std::move(loaded.model));
  }
  SampleOptions opt;
  opt.channels = c.C;
  opt.side = c.M;
  opt.root_seed = c.seed;
  opt.workers = c.workers;
  const auto tensors = sample_topologies(*denoiser, schedule, count, opt);
  const double sampling = seconds_since(t0);

  std::size_t rejected = 0;
  nlohmann::json rejects = nlohmann::json::array();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    const BinaryMatrix m = unfold(tensors[i]);
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu.topo", i);
    const auto verdict = prefilter(m);
    if (!verdict) {
      ++rejected;
      rejects.push_back({{"index", i}, {"reason", verdict.reason}});
      continue;
    }
    write_file(c.output_dir / name, topology_to_text(m));
  }
  const double fraction = count ? double(rejected) / double(count) : 0.0;
  nlohmann::json report = {{"requested", count},
                           {"accepted", count - rejected},
                           {"filtered", rejected},
                           {"filtered_fraction", fraction},
                           {"sampling_seconds", sampling},
                           {"rejected", rejects}};
  write_file(c.output_dir / "sample_report.json", report.dump(2) + "\n");
  std::cout << "sampled " << count << " topologies, " << rejected << " filtered ("
            << 100.0 * fraction << "%)\n";
  return kOk;
}

int cmd_legalize(const Globals& g, const std::vector<std::string>& inputs, int per_topology, bool use_library) {
  const auto wall0 = Clock::now();
  const RunConfig c = load(g);
  const RuleSet rules = load_rules(c);
  Initializer init = Initializer::random();
  if (use_library) {
    if (c.delta_library.empty() || !fs::exists(c.delta_library))
      throw ConfigurationError("delta_library must name an existing file for --library");
    init = Initializer::from_library(
        with_file(c.delta_library, [](const std::string& t) { return delta_library_from_text(t); }));
  }
  std::vector<BinaryMatrix> topologies;
  for (const auto& in : inputs) topologies.push_back(read_topology(in));
  const double reading = seconds_since(wall0);

  struct Outcome {
    SolveManyResult result;
    std::string rejected;
    double seconds = 0;
  };
  std::vector<Outcome> outcomes(topologies.size());
  const auto solve0 = Clock::now();
  parallel_for(topologies.size(), c.workers, [&](std::size_t i) {
    const auto t0 = Clock::now();
    const auto verdict = prefilter(topologies[i]);
    if (!verdict) {
      outcomes[i].rejected = verdict.reason;
    } else {
      outcomes[i].result = solve_many(topologies[i], rules, per_topology, c.seed + i, init);
    }
    outcomes[i].seconds = seconds_since(t0);
  });
  const double solving = seconds_since(solve0);

  // Single writer: DRC verification and output in input order.
  const auto write0 = Clock::now();
  double checking = 0;
  nlohmann::json entries = nlohmann::json::array();
  std::size_t emitted = 0, solved_topologies = 0;
  for (std::size_t i = 0; i < topologies.size(); ++i) {
    const std::string id = fs::path(inputs[i]).stem().string();
    nlohmann::json entry = {{"topology", id}, {"source", inputs[i]}, {"solve_seconds", outcomes[i].seconds}};
    if (!outcomes[i].rejected.empty()) {
      std::cerr << "skip " << inputs[i] << ": " << outcomes[i].rejected << "\n";
      entry["status"] = "rejected";
      entry["reason"] = outcomes[i].rejected;
      entries.push_back(entry);
      continue;
    }
    const auto& r = outcomes[i].result;
    nlohmann::json solutions = nlohmann::json::array();
    for (std::size_t j = 0; j < r.solutions.size(); ++j) {
      const auto& s = r.solutions[j];
      const auto c0 = Clock::now();
      const LayoutPattern l = reconstruct_layout({topologies[i], s.delta_x, s.delta_y});
      const auto violations = check_drc(l, rules);
      checking += seconds_since(c0);
      if (!violations.empty()) {
        std::cerr << "drop " << id << " solution " << j << ": " << violations.size() << " DRC violation(s)\n";
        continue;
      }
      char name[64];
      std::snprintf(name, sizeof name, "_s%03zu.json", j);
      const std::string file = id + name;
      write_file(c.output_dir / file, layout_to_json(l));
      solutions.push_back({{"solution_index", j},
                           {"file", file},
                           {"iterations", s.iterations},
                           {"residual", s.residual},
                           {"initializer", s.initializer}});
      ++emitted;
    }
    if (solutions.empty()) std::cerr << "skip " << inputs[i] << ": no legal solution found\n";
    else ++solved_topologies;
    entry["status"] = solutions.empty() ? "infeasible" : "solved";
    entry["fully_determined"] = r.fully_determined;
    entry["partial"] = r.partial;
    entry["solutions"] = solutions;
    entries.push_back(entry);
  }
  const double writing = seconds_since(write0) - checking;
  nlohmann::json manifest = {
      {"initializer", use_library ? "library" : "random"},
      {"per_topology", per_topology},
      {"seed", c.seed},
      {"workers", c.workers},
      {"topologies", entries},
      {"emitted", emitted},
      {"timing",
       {{"reading_seconds", reading},
        {"solving_seconds", solving},
        {"checking_seconds", checking},
        {"writing_seconds", writing},
        {"wall_seconds", seconds_since(wall0)}}}};
  const fs::path sample_report = inputs.empty() ? fs::path() : fs::path(inputs[0]).parent_path() / "sample_report.json";
  if (!inputs.empty() && fs::exists(sample_report)) {
    const auto rep = nlohmann::json::parse(read_file(sample_report), nullptr, false);
    if (rep.is_object() && rep.contains("sampling_seconds"))
      manifest["timing"]["sampling_seconds"] = rep["sampling_seconds"];
  }
  write_file(c.output_dir / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "legalized " << solved_topologies << "/" << topologies.size() << " topologies, " << emitted
            << " layout(s) written\n";
  return !topologies.empty() && solved_topologies == 0 ? kInfeasible : kOk;
}

int cmd_drc(const Globals& g, const std::vector<std::string>& inputs) {
  const RunConfig c = load(g);
  const RuleSet rules = load_rules(c);
  std::size_t legal = 0;
  for (const auto& in : inputs) {
    const auto violations = check_drc(read_any_layout(in), rules);
    legal += violations.empty();
    write_file(c.output_dir / fs::path(in).stem().concat(".violations.json"), violations_to_json(violations));
    std::cout << in << ": " << violations.size() << " violation(s)\n";
  }
  std::cout << "legal " << legal << "/" << inputs.size() << "\n";
  return kOk;
}

int cmd_stats(const Globals& g, const std::vector<std::string>& inputs) {
  const RunConfig c = load(g);
  std::vector<Complexity> cs;
  for (const auto& in : inputs) {
    const fs::path p(in);
    if (p.extension() == ".topo") {
      // Complexity depends on the topology only; unit deltas stand in when absent.
      const BinaryMatrix t = read_topology(p);
      SquishPattern s{t, std::vector<Coord>(t.cols(), 1), std::vector<Coord>(t.rows(), 1)};
      cs.push_back(complexity(s));
    } else {
      cs.push_back(complexity(extract_squish(read_layout(p))));
    }
  }
  const auto report = diversity_of(cs);
  write_file(c.output_dir / "diversity.json", diversity_to_json(report));
  write_file(c.output_dir / "histogram.csv", histogram_to_csv(report));
  char line[96];
  std::snprintf(line, sizeof line, "%zu pattern(s), %zu bin(s), entropy %.6f bits\n", report.pattern_count,
                report.counts.size(), report.entropy_bits);
  std::cout << line;
  return kOk;
}

int cmd_render(const Globals& g, const std::vector<std::string>& inputs, int pixels, bool grid) {
  const RunConfig c = load(g);
  if (pixels < 1) throw ParameterError("--pixels must be positive");
  for (const auto& in : inputs) {
    const auto raster = rasterize(read_any_layout(in), {pixels, grid});
    write_png(c.output_dir / fs::path(in).stem().concat(".png"), raster);
  }
  std::cout << "rendered " << inputs.size() << " image(s) into " << c.output_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"squishdiff: squish-pattern layout generation with discrete diffusion"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "Key-value run configuration file");
  app.add_option("--seed", g.seed, "Root seed (overrides the config)");
  app.add_option("--workers", g.workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory (overrides the config)");

  std::vector<std::string> inputs;
  int pad = 0, per_topology = 1, pixels = 512;
  std::size_t count = 16;
  bool oracle = false, library = false, grid = false;

  auto* encode = app.add_subcommand("encode", "Layout JSON -> topology + deltas files");
  encode->add_option("layouts", inputs, "Layout JSON files")->required()->check(CLI::ExistingFile);
  encode->add_option("--pad", pad, "Pad to a square topology of this side");

  auto* decode = app.add_subcommand("decode", "Topology + deltas files -> layout JSON");
  decode->add_option("topologies", inputs, "Topology files (deltas read from the sibling .deltas)")
      ->required()
      ->check(CLI::ExistingFile);

  auto* train_cmd = app.add_subcommand("train", "Train the denoiser on dataset_dir");

  auto* sample = app.add_subcommand("sample", "Sample topologies from the checkpoint");
  sample->add_option("-n,--count", count, "Number of topologies");
  sample->add_flag("--oracle", oracle, "Use the exact denoiser over dataset_dir instead of a checkpoint");

  auto* legalize = app.add_subcommand("legalize", "Solve legal deltas for topology files");
  legalize->add_option("topologies", inputs, "Topology files")->required()->check(CLI::ExistingFile);
  legalize->add_option("--per-topology", per_topology, "Distinct solutions per topology")->check(CLI::PositiveNumber);
  legalize->add_flag("--library", library, "Start from delta_library pairs instead of random deltas");

  auto* drc = app.add_subcommand("drc", "Check layouts against the rules");
  drc->add_option("layouts", inputs, "Layout JSON or topology files")->required()->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Complexity histogram and entropy");
  stats->add_option("patterns", inputs, "Layout JSON or topology files")->required()->check(CLI::ExistingFile);

  auto* render = app.add_subcommand("render", "Rasterize layouts to PNG");
  render->add_option("layouts", inputs, "Layout JSON or topology files")->required()->check(CLI::ExistingFile);
  render->add_option("--pixels", pixels, "Image side in pixels");
  render->add_flag("--grid", grid, "Draw scan lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*encode) return cmd_encode(g, inputs, pad);
    if (*decode) return cmd_decode(g, inputs);
    if (*train_cmd) return cmd_train(g);
    if (*sample) return cmd_sample(g, count, oracle);
    if (*legalize) return cmd_legalize(g, inputs, per_topology, library);
    if (*drc) return cmd_drc(g, inputs);
    if (*stats) return cmd_stats(g, inputs);
    if (*render) return cmd_render(g, inputs, pixels, grid);
  } catch (const TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiverged;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
