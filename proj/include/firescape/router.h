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

// Escape route planning: weighted A* toward the nearest reachable safe
// location over a pruned, elevation-augmented ground graph.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "firescape/geo.h"
#include "firescape/ground_graph.h"

namespace firescape {

/// Edge weight w(e) = alpha * length(e) + beta * gain(e, direction).
struct CostWeights {
  double alpha = 1.0;
  double beta = 0.0;

  /// Throws ContractViolation unless both are finite, >= 0, not both zero.
  void validate() const;
};

struct Route {
  std::vector<GeoPoint> waypoints;
  std::vector<std::string> node_ids;
  std::vector<double> leg_lengths_m;  // one per traversed edge
  double length_m = 0.0;
  double cost = 0.0;
  GeoPoint goal;                // the safe location reached
  std::size_t goal_index = 0;   // its position in the caller's safe list
};

struct NoRouteFound {
  /// Safe locations tried, in the order attempted.
  std::vector<GeoPoint> attempted_goals;
};

struct PlanStats {
  std::size_t expansions = 0;  // node pops across every A* attempt
  std::size_t goals_tried = 0;
};

struct PlanResult {
  std::variant<Route, NoRouteFound> outcome;
  PlanStats stats;

  bool found() const { return std::holds_alternative<Route>(outcome); }
  const Route& route() const { return std::get<Route>(outcome); }
  const NoRouteFound& failure() const { return std::get<NoRouteFound>(outcome); }
};

/// Maps origin and each safe location to their nearest nodes, orders the
/// safes by haversine distance between mapped nodes, then runs A* toward
/// each in turn and returns the first route found. Equal f-scores pop in
/// insertion order. Throws ContractViolation on an empty graph or an
/// empty safe list.
PlanResult plan_escape_route(const GroundGraph& g, const GeoPoint& origin, std::span<const GeoPoint> safes,
                             const CostWeights& w);

/// Single A* search between two nodes; nullopt when unreachable.
/// The route's goal fields are left for the caller to fill.
std::optional<Route> astar(const GroundGraph& g, std::size_t source, std::size_t target, const CostWeights& w,
                           std::size_t* expansions = nullptr);

/// Sum of the route's edge lengths.
double route_length(const Route& r);

/// Recomputes the length of a node-id path from the graph's edge table,
/// picking the shortest parallel edge. Throws NotFound for a non-edge hop.
double route_length(const GroundGraph& g, std::span<const std::string> node_ids);

/// Edges whose declared length is shorter than the straight-line distance
/// between endpoints; the A* heuristic is only admissible without them.
std::size_t count_heuristic_violations(const GroundGraph& g);

}  // namespace firescape
