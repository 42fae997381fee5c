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

#include "squishdiff/squish_io.hpp"

#include "squishdiff/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace squishdiff {

using nlohmann::json;

LayoutPattern layout_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("layout JSON: ") + e.what());
  }
  try {
    if (doc.at("units").get<std::string>() != "nm")
      throw ValidationError("layout JSON: units must be \"nm\"");
    const auto& window = doc.at("window");
    if (!window.is_array() || window.size() != 2)
      throw ValidationError("layout JSON: window must be [width, height]");
    LayoutPattern out;
    out.width = window[0].get<Coord>();
    out.height = window[1].get<Coord>();
    for (const auto& poly : doc.at("polygons")) {
      Polygon p;
      for (const auto& v : poly) {
        if (!v.is_array() || v.size() != 2)
          throw ValidationError("layout JSON: polygon " + std::to_string(out.polygons.size()) +
                                " has a vertex that is not [x, y]");
        p.push_back({v[0].get<Coord>(), v[1].get<Coord>()});
      }
      out.polygons.push_back(std::move(p));
    }
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("layout JSON: ") + e.what());
  }
}

std::string layout_to_json(const LayoutPattern& layout) {
  json polys = json::array();
  for (const auto& p : layout.polygons) {
    json verts = json::array();
    for (const auto& v : p) verts.push_back({v.x, v.y});
    polys.push_back(std::move(verts));
  }
  json doc = {{"units", "nm"}, {"window", {layout.width, layout.height}}, {"polygons", polys}};
  return doc.dump() + "\n";
}

BinaryMatrix topology_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  long h = 0, w = 0;
  if (!std::getline(in, line)) throw ValidationError("topology: line 1: missing header");
  {
    std::istringstream header(line);
    if (!(header >> h >> w) || h <= 0 || w <= 0)
      throw ValidationError("topology: line 1: expected positive \"H W\"");
  }
  BinaryMatrix out(h, w);
  for (long r = 0; r < h; ++r) {
    if (!std::getline(in, line))
      throw ValidationError("topology: line " + std::to_string(r + 2) + ": missing row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (static_cast<long>(line.size()) != w)
      throw ValidationError("topology: line " + std::to_string(r + 2) + ": expected " +
                            std::to_string(w) + " characters");
    for (long c = 0; c < w; ++c) {
      if (line[c] != '0' && line[c] != '1')
        throw ValidationError("topology: line " + std::to_string(r + 2) + ": invalid character");
      out(r, c) = static_cast<std::uint8_t>(line[c] - '0');
    }
  }
  return out;
}

std::string topology_to_text(const BinaryMatrix& topology) {
  std::string out = std::to_string(topology.rows()) + " " + std::to_string(topology.cols()) + "\n";
  for (Eigen::Index r = 0; r < topology.rows(); ++r) {
    for (Eigen::Index c = 0; c < topology.cols(); ++c) out.push_back(topology(r, c) ? '1' : '0');
    out.push_back('\n');
  }
  return out;
}

namespace {

std::vector<Coord> parse_integers(const std::string& line, int line_no) {
  std::istringstream in(line);
  std::vector<Coord> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ValidationError("deltas: line " + std::to_string(line_no) + ": bad integer '" + token +
                            "'");
    }
  }
  return out;
}

std::string join(const std::vector<Coord>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out.push_back(' ');
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::pair<std::vector<Coord>, std::vector<Coord>> deltas_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string lx, ly;
  if (!std::getline(in, lx) || !std::getline(in, ly))
    throw ValidationError("deltas: expected two lines");
  auto dx = parse_integers(lx, 1);
  auto dy = parse_integers(ly, 2);
  if (dx.empty() || dy.empty()) throw ValidationError("deltas: empty vector");
  return {std::move(dx), std::move(dy)};
}

std::string deltas_to_text(const std::vector<Coord>& delta_x, const std::vector<Coord>& delta_y) {
  return join(delta_x) + "\n" + join(delta_y) + "\n";
}

DeltaLibrary delta_library_from_text(const std::string& text) {
  DeltaLibrary out;
  std::istringstream in(text);
  std::string line;
  std::vector<std::pair<std::string, int>> pending;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    pending.emplace_back(line, number);
    if (pending.size() == 2) {
      auto dx = parse_integers(pending[0].first, pending[0].second);
      auto dy = parse_integers(pending[1].first, pending[1].second);
      if (dx.empty() || dy.empty())
        throw ValidationError("delta library line " + std::to_string(pending[0].second) + ": empty vector");
      out.emplace_back(std::move(dx), std::move(dy));
      pending.clear();
    }
  }
  if (!pending.empty())
    throw ValidationError("delta library line " + std::to_string(pending[0].second) +
                          ": delta_x without a delta_y line");
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << contents;
}

}  // namespace squishdiff
