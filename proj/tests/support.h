// Copyright 2026 The Firescape Authors
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

// Shared fixtures and reference implementations for the test suite.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "firescape/geo.h"
#include "firescape/ground_graph.h"
#include "firescape/rng.h"
#include "firescape/router.h"
#include "firescape/synthetic.h"

namespace firescape::testing {

inline std::filesystem::path data_dir() { return FIRESCAPE_TEST_DATA; }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("firescape-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Star-shaped polygon around `center`: one jittered angle per sector so no
// gap reaches pi, random radii. Simple because the center sees every edge.
inline FirePolygon random_star_polygon(Rng& rng, const GeoPoint& center, double min_r_m, double max_r_m,
                                       std::size_t vertices) {
  const double sector = 2.0 * std::numbers::pi / static_cast<double>(vertices);
  FirePolygon poly;
  poly.name = "star";
  for (std::size_t i = 0; i < vertices; ++i) {
    const double a = (static_cast<double>(i) + rng.uniform(0.05, 0.95)) * sector;
    const double r = rng.uniform(min_r_m, max_r_m);
    poly.exterior.push_back(offset_m(center, r * std::cos(a), r * std::sin(a)));
  }
  return poly;
}

// Random connected graph: a random spanning tree plus extra edges. Lengths
// and elevations are integers so every cost is exact in doubles.
inline GroundGraph random_graph(Rng& rng, std::size_t n, std::size_t extra_edges) {
  const GeoPoint origin{37.0, -120.0};
  std::vector<GroundGraph::Node> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    GroundGraph::Node node;
    node.id = "n" + std::to_string(i);
    node.pos = offset_m(origin, rng.uniform(0.0, 2000.0), rng.uniform(0.0, 2000.0));
    node.elevation_m = static_cast<double>(rng.index(200));
    nodes.push_back(node);
  }
  std::vector<GroundGraph::Edge> edges;
  auto add = [&](std::size_t u, std::size_t v) {
    // At least the straight-line distance so the haversine heuristic stays
    // admissible.
    const double len = std::ceil(haversine(nodes[u].pos, nodes[v].pos)) + static_cast<double>(rng.index(50)) + 1.0;
    const double dh = nodes[v].elevation_m - nodes[u].elevation_m;
    edges.push_back({u, v, len, std::max(0.0, dh), std::max(0.0, -dh)});
  };
  for (std::size_t i = 1; i < n; ++i) add(rng.index(i), i);
  for (std::size_t k = 0; k < extra_edges && n > 2; ++k) {
    const std::size_t u = rng.index(n);
    const std::size_t v = rng.index(n);
    if (u != v) add(u, v);
  }
  return GroundGraph(std::move(nodes), std::move(edges));
}

// Bellman-Ford over integer-scaled weights; independent of the A* code.
// Returns per-node optimum cost from `source` in integer weight units.
inline std::vector<std::int64_t> bellman_ford(const GroundGraph& g, std::size_t source, std::int64_t alpha_s,
                                              std::int64_t beta_s) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  std::vector<std::int64_t> dist(g.node_count(), kInf);
  dist[source] = 0;
  for (std::size_t round = 0; round + 1 < g.node_count(); ++round) {
    bool changed = false;
    for (const auto& e : g.edges()) {
      const auto len = static_cast<std::int64_t>(std::llround(e.length_m));
      const auto fwd = alpha_s * len + beta_s * static_cast<std::int64_t>(std::llround(e.gain_uv));
      const auto back = alpha_s * len + beta_s * static_cast<std::int64_t>(std::llround(e.gain_vu));
      if (dist[e.u] < kInf && dist[e.u] + fwd < dist[e.v]) {
        dist[e.v] = dist[e.u] + fwd;
        changed = true;
      }
      if (dist[e.v] < kInf && dist[e.v] + back < dist[e.u]) {
        dist[e.u] = dist[e.v] + back;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace firescape::testing
