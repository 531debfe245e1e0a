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

#include "firescape/ground_graph.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {

GroundGraph::GroundGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!index_.emplace(nodes_[i].id, i).second) {
      throw LoadError(fmt::format("duplicate node id '{}'", nodes_[i].id));
    }
  }
  std::vector<std::size_t> degree(nodes_.size(), 0);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.u >= nodes_.size() || edge.v >= nodes_.size()) {
      throw LoadError(fmt::format("edge {} references a missing node", e));
    }
    const std::string name = fmt::format("{}-{}", nodes_[edge.u].id, nodes_[edge.v].id);
    if (edge.u == edge.v) throw LoadError(fmt::format("edge {} is a self-loop", name));
    if (!(edge.length_m > 0.0) || !std::isfinite(edge.length_m)) {
      throw LoadError(fmt::format("edge {} has non-positive length {}", name, edge.length_m));
    }
    if (edge.gain_uv < 0.0 || edge.gain_vu < 0.0) {
      throw LoadError(fmt::format("edge {} has negative elevation gain", name));
    }
    ++degree[edge.u];
    ++degree[edge.v];
  }
  offsets_.assign(nodes_.size() + 1, 0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) offsets_[i + 1] = offsets_[i] + degree[i];
  arcs_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    arcs_[fill[edge.u]++] = Arc{edge.v, e, edge.length_m, edge.gain_uv};
    arcs_[fill[edge.v]++] = Arc{edge.u, e, edge.length_m, edge.gain_vu};
  }
}

std::optional<std::size_t> GroundGraph::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

GroundGraph prune(const GroundGraph& g, std::span<const FirePolygon> fires, const PruneOptions& options) {
  std::vector<std::size_t> remap(g.node_count(), SIZE_MAX);
  std::vector<GroundGraph::Node> nodes;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    if (point_in_any(g.node(i).pos, fires)) continue;
    remap[i] = nodes.size();
    nodes.push_back(g.node(i));
  }
  std::vector<GroundGraph::Edge> edges;
  for (const auto& e : g.edges()) {
    if (remap[e.u] == SIZE_MAX || remap[e.v] == SIZE_MAX) continue;
    if (options.crossing_edges) {
      const GeoPoint& a = g.node(e.u).pos;
      const GeoPoint& b = g.node(e.v).pos;
      const bool crosses =
          std::any_of(fires.begin(), fires.end(), [&](const FirePolygon& f) { return segment_crosses_polygon(a, b, f); });
      if (crosses) continue;
    }
    GroundGraph::Edge kept = e;
    kept.u = remap[e.u];
    kept.v = remap[e.v];
    edges.push_back(kept);
  }
  return GroundGraph(std::move(nodes), std::move(edges));
}

GroundGraph augment_elevation(const GroundGraph& g, const ElevationProvider& provider, int samples_per_edge,
                              GainMode mode) {
  if (samples_per_edge < 0) {
    throw ContractViolation(fmt::format("samples_per_edge must be >= 0, got {}", samples_per_edge));
  }
  std::vector<GroundGraph::Node> nodes = g.nodes();
  for (auto& n : nodes) {
    try {
      n.elevation_m = provider.at(n.pos);
    } catch (const Error& e) {
      throw Error(fmt::format("elevation for node '{}': {}", n.id, e.what()));
    }
  }
  std::vector<GroundGraph::Edge> edges = g.edges();
  const int m = samples_per_edge;
  std::vector<double> profile;
  for (auto& e : edges) {
    const auto& u = nodes[e.u];
    const auto& v = nodes[e.v];
    profile.assign(1, u.elevation_m);
    try {
      for (int i = 1; i <= m; ++i) {
        profile.push_back(provider.at(interpolate(u.pos, v.pos, static_cast<double>(i) / (m + 1))));
      }
    } catch (const Error& err) {
      throw Error(fmt::format("elevation for edge '{}-{}': {}", u.id, v.id, err.what()));
    }
    profile.push_back(v.elevation_m);

    if (mode == GainMode::kEndpoint) {
      e.gain_uv = std::max(0.0, v.elevation_m - u.elevation_m);
      e.gain_vu = std::max(0.0, u.elevation_m - v.elevation_m);
    } else {
      double up = 0.0;
      double down = 0.0;
      for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
        const double d = profile[i + 1] - profile[i];
        if (d > 0) up += d;
        else down -= d;
      }
      e.gain_uv = up;
      e.gain_vu = down;
    }
  }
  return GroundGraph(std::move(nodes), std::move(edges));
}

std::size_t nearest_node(const GroundGraph& g, const GeoPoint& p) {
  if (g.empty()) throw ContractViolation("nearest_node on an empty graph: no routable terrain");
  std::size_t best = 0;
  double best_d = haversine(p, g.node(0).pos);
  for (std::size_t i = 1; i < g.node_count(); ++i) {
    const double d = haversine(p, g.node(i).pos);
    if (d < best_d || (d == best_d && g.node(i).id < g.node(best).id)) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace firescape
