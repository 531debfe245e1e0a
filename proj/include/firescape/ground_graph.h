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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "firescape/elevation.h"
#include "firescape/geo.h"

namespace firescape {

/// Undirected walking graph. Each edge stores its length and the uphill
/// gain for both traversal directions. Immutable once built; every
/// transformation returns a new graph.
class GroundGraph {
 public:
  struct Node {
    std::string id;
    GeoPoint pos;
    double elevation_m = 0.0;
  };

  struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double length_m = 0.0;
    double gain_uv = 0.0;  // climbing from u to v
    double gain_vu = 0.0;  // climbing from v to u
  };

  /// Directed view of an edge as seen from one endpoint.
  struct Arc {
    std::size_t to = 0;
    std::size_t edge = 0;
    double length_m = 0.0;
    double gain_m = 0.0;
  };

  GroundGraph() = default;

  /// Throws LoadError on duplicate node ids, out-of-range endpoints,
  /// self-loops, non-positive lengths or negative gains.
  GroundGraph(std::vector<Node> nodes, std::vector<Edge> edges);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  const Node& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  std::optional<std::size_t> find(std::string_view id) const;

  std::span<const Arc> arcs(std::size_t node) const {
    return {arcs_.data() + offsets_[node], arcs_.data() + offsets_[node + 1]};
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
  // CSR adjacency
  std::vector<std::size_t> offsets_{0};
  std::vector<Arc> arcs_;
};

enum class GainMode {
  kEndpoint,   // max(0, h(v) - h(u)) from the endpoint elevations
  kPiecewise,  // sum of positive rises between consecutive samples
};

struct PruneOptions {
  /// Also drop edges whose segment touches a fire ring even when both
  /// endpoints are outside.
  bool crossing_edges = false;
};

/// Removes every node strictly inside any fire polygon together with its
/// incident edges. The input graph is left untouched.
GroundGraph prune(const GroundGraph& g, std::span<const FirePolygon> fires, const PruneOptions& options = {});

/// Assigns node elevations from the provider and recomputes both
/// directional gains per edge, sampling `samples_per_edge` interior points.
GroundGraph augment_elevation(const GroundGraph& g, const ElevationProvider& provider, int samples_per_edge,
                              GainMode mode = GainMode::kEndpoint);

/// Node minimizing haversine distance to p; ties go to the smallest id.
/// Throws ContractViolation on an empty graph.
std::size_t nearest_node(const GroundGraph& g, const GeoPoint& p);

}  // namespace firescape
