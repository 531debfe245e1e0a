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

// Fleet flight planning over the fire perimeter: waypoint densification,
// service-drone clustering, energy feasibility and coordinator hover
// placement.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "firescape/geo.h"
#include "firescape/ids.h"

namespace firescape {

inline constexpr double kDefaultWaypointSpacingM = 10.0;

struct PerimeterWaypoints {
  /// One densified exterior ring per polygon, vertex order preserved.
  std::vector<std::vector<GeoPoint>> rings;

  /// All rings concatenated in order; this is the set the SDs share.
  std::vector<GeoPoint> pooled() const;
};

/// Inserts equally spaced points on every exterior edge (closing edge
/// included) so that consecutive waypoints are at most max_spacing_m apart.
/// An edge of length L normally receives ceil(L / max_spacing_m) - 1 interior
/// points. Throws ContractViolation for max_spacing_m <= 0 and Error for a
/// zero-length perimeter.
std::vector<GeoPoint> densify_ring(std::span<const GeoPoint> ring, double max_spacing_m);
PerimeterWaypoints densify_perimeter(const FirePolygon& poly, double max_spacing_m = kDefaultWaypointSpacingM);
PerimeterWaypoints densify_perimeter(std::span<const FirePolygon> polys,
                                     double max_spacing_m = kDefaultWaypointSpacingM);

struct Cluster {
  SdId sd;
  GeoPoint centroid;                    // the sampled seed waypoint
  std::vector<std::size_t> indices;     // into the pooled waypoint list
  std::vector<GeoPoint> waypoints;      // same order as indices
};

struct SdAssignment {
  std::vector<Cluster> clusters;  // one per drone, possibly empty

  std::size_t waypoint_count() const;
};

/// One assignment pass of K-means: every waypoint goes to its nearest
/// centroid by haversine (lowest centroid index on ties); centroids are
/// never updated. Cluster k belongs to sds[k].
SdAssignment assign_to_centroids(std::span<const GeoPoint> waypoints, std::span<const std::size_t> centroid_indices,
                                 std::span<const SdId> sds);

/// Samples sds.size() distinct waypoint indices as centroids (seeded) and
/// runs assign_to_centroids. Throws ContractViolation when there are
/// more drones than waypoints.
SdAssignment assign_waypoints(std::span<const GeoPoint> waypoints, std::span<const SdId> sds, std::uint64_t seed);
SdAssignment assign_waypoints(std::span<const GeoPoint> waypoints, std::size_t sd_count, std::uint64_t seed);

/// Distinct indices sampled uniformly without replacement.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count, std::uint64_t seed);

struct EnergyModel {
  double flight_endurance_s = 1800.0;
  double speed_mps = 5.0;

  void validate() const;
};

struct DroneFeasibility {
  SdId sd;
  double tour_m = 0.0;
  double duration_s = 0.0;
  bool feasible = true;
};

struct FeasibilityReport {
  std::vector<DroneFeasibility> drones;
  bool all_feasible = true;
};

/// A cluster is feasible when its tour (waypoints in order) takes no longer
/// than the endurance at cruise speed. When base_station is set, the leg
/// from it to the first waypoint is added.
FeasibilityReport check_feasibility(const SdAssignment& assignment, const EnergyModel& model,
                                    std::optional<GeoPoint> base_station = std::nullopt);

double tour_length(std::span<const GeoPoint> waypoints);

/// Farthest-first traversal starting from candidates[first]: each next pick
/// maximizes the minimum haversine distance to the picks so far (lowest
/// candidate index on ties). Returns candidate indices in pick order.
std::vector<std::size_t> farthest_first(std::span<const GeoPoint> candidates, std::size_t count, std::size_t first);

/// Hover points in pick order; the first pick is a seeded uniform choice.
/// Throws ContractViolation when cd_count is 0 or exceeds the candidates.
std::vector<GeoPoint> place_coordinators(std::span<const GeoPoint> candidates, std::size_t cd_count,
                                         std::uint64_t seed);

/// n points drawn uniformly from the union bounding box, keeping those
/// strictly inside some fire polygon. Throws Error after 1000*n draws.
std::vector<GeoPoint> sample_candidates(std::span<const FirePolygon> polys, std::size_t n, std::uint64_t seed);

}  // namespace firescape
