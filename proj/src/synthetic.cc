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

#include "firescape/synthetic.h"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "firescape/rng.h"

namespace firescape {

GeoPoint offset_m(const GeoPoint& origin, double north_m, double east_m) {
  constexpr double kMetersPerDegree = kEarthRadiusM * std::numbers::pi / 180.0;
  const double lat = origin.lat + north_m / kMetersPerDegree;
  const double lon = origin.lon + east_m / (kMetersPerDegree * std::cos(origin.lat * std::numbers::pi / 180.0));
  return {lat, lon};
}

Scenario make_synthetic_scenario(const SyntheticOptions& o) {
  if (o.grid_side < 2 || o.fire_vertices < 3 || o.safe_count == 0 || o.safe_count > 8) {
    throw ContractViolation("synthetic scenario: need grid_side >= 2, >= 3 fire vertices, 1..8 safe locations");
  }
  const double half = 0.5 * static_cast<double>(o.grid_side - 1) * o.grid_spacing_m;
  if (o.fire_radius_m * 1.25 >= half) throw ContractViolation("synthetic scenario: fire does not fit in the grid");
  Rng rng(derive_seed(o.seed, 100));

  Scenario sc;
  FirePolygon fire;
  fire.name = "synthetic-fire";
  for (std::size_t k = 0; k < o.fire_vertices; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(o.fire_vertices);
    const double r = o.fire_radius_m * rng.uniform(0.8, 1.2);
    fire.exterior.push_back(offset_m(o.center, r * std::sin(angle), r * std::cos(angle)));
  }
  validate_polygon(fire);
  sc.fire_polygons.push_back(std::move(fire));

  std::vector<GroundGraph::Node> nodes;
  const std::size_t n = o.grid_side;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      GroundGraph::Node node;
      node.id = fmt::format("n{}_{}", r, c);
      node.pos = offset_m(o.center, -half + static_cast<double>(r) * o.grid_spacing_m,
                          -half + static_cast<double>(c) * o.grid_spacing_m);
      nodes.push_back(std::move(node));
    }
  }
  std::vector<GroundGraph::Edge> edges;
  auto link = [&](std::size_t a, std::size_t b) {
    // Integer lengths at or above the straight-line distance.
    const double straight = haversine(nodes[a].pos, nodes[b].pos);
    const double len = std::ceil(straight) + static_cast<double>(rng.index(4));
    edges.push_back({a, b, len, 0.0, 0.0});
  };
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const std::size_t i = r * n + c;
      if (c + 1 < n) link(i, i + 1);
      if (r + 1 < n) link(i, i + n);
    }
  }
  const std::size_t last = n - 1;
  const std::size_t mid = n / 2;
  const std::pair<std::size_t, std::size_t> spots[] = {{0, 0},   {0, last},   {last, 0}, {last, last},
                                                       {0, mid}, {last, mid}, {mid, 0},  {mid, last}};
  for (std::size_t s = 0; s < o.safe_count; ++s) {
    sc.safe_locations.push_back(nodes[spots[s].first * n + spots[s].second].pos);
  }

  sc.elevation = ElevationProvider::plane(o.slope_lat, o.slope_lon,
                                          -(o.slope_lat * o.center.lat + o.slope_lon * o.center.lon));
  sc.ground_graph_source = "synthetic";
  sc.graph = augment_elevation(GroundGraph(std::move(nodes), std::move(edges)), sc.elevation, sc.samples_per_edge,
                               sc.gain_mode);
  sc.rng_seed = o.seed;
  sc.energy.speed_mps = sc.sd_speed_mps;
  return sc;
}

}  // namespace firescape
