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

// File formats: GeoJSON fire perimeters and safe locations, the JSON ground
// graph, route export, and the scenario configuration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firescape/elevation.h"
#include "firescape/geo.h"
#include "firescape/ground_graph.h"
#include "firescape/perimeter.h"
#include "firescape/router.h"

namespace firescape {

/// Reads a GeoJSON FeatureCollection. Every Polygon becomes one
/// FirePolygon and every MultiPolygon part another; the closing vertex is
/// dropped and repeated consecutive vertices collapsed. Other geometry is
/// skipped with a warning (appended to `warnings` when given).
std::vector<FirePolygon> load_fire_polygons(const std::filesystem::path& path,
                                            std::vector<std::string>* warnings = nullptr);

/// FeatureCollection of Point features, in file order.
std::vector<GeoPoint> load_safe_locations(const std::filesystem::path& path);

/// Graph JSON without elevation: every node at 0 m and every gain 0.
GroundGraph read_ground_graph(const std::filesystem::path& path);

/// read_ground_graph followed by augment_elevation.
GroundGraph load_ground_graph(const std::filesystem::path& path, const ElevationProvider& provider,
                              int samples_per_edge, GainMode mode = GainMode::kEndpoint);

std::string ground_graph_to_json(const GroundGraph& g);
void save_ground_graph(const GroundGraph& g, const std::filesystem::path& path);

/// LineString feature (a Point feature for a single-node route) with the
/// route's length, cost and goal as properties.
std::string route_to_geojson(const Route& route);
void export_route(const Route& route, const std::filesystem::path& path);

/// Waypoints of a file written by export_route.
std::vector<GeoPoint> parse_route_geojson(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place, so readers
/// never see a partial file. Throws Error naming the path on I/O failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

enum class RouteTimingMode {
  kModeled,   // base + expansions * per-expansion cost; reproducible
  kMeasured,  // wall-clock planner time
};

struct RouteTiming {
  RouteTimingMode mode = RouteTimingMode::kModeled;
  double base_s = 0.001;
  double per_expansion_s = 1e-5;
};

enum class FaultKind { kKillCd, kKillSd };

struct FaultSpec {
  double t = 0.0;
  FaultKind kind = FaultKind::kKillCd;
  std::string target;  // "cd-N", "sd-N", or "client" for the heartbeat client
};

struct Scenario {
  std::vector<FirePolygon> fire_polygons;
  std::vector<GeoPoint> safe_locations;
  std::filesystem::path ground_graph_source;
  GroundGraph graph;  // elevation-augmented, not yet pruned
  ElevationProvider elevation;
  int samples_per_edge = 0;
  GainMode gain_mode = GainMode::kEndpoint;
  bool prune_crossing_edges = false;

  std::size_t sd_count = 10;
  std::size_t cd_count = 3;

  double frame_interval_s = 2.0;
  double heartbeat_interval_s = 30.0;
  double walk_update_interval_s = 10.0;
  double sd_speed_mps = 5.0;
  double walk_speed_mps = 1.5;
  double surveillance_duration_s = 600.0;
  double max_sim_time_s = 7200.0;

  double p_start = 0.8;
  double p_end = 0.2;

  CostWeights weights{1.0, 1.0};
  std::uint64_t rng_seed = 1;

  double max_spacing_m = kDefaultWaypointSpacingM;
  std::size_t candidate_count = 200;
  bool include_transit_leg = false;
  std::optional<GeoPoint> base_station;

  EnergyModel energy;
  std::size_t replication_factor = 3;
  int miss_threshold = 3;
  double arrival_tolerance_m = 5.0;
  bool literal_walk = false;

  double detection_latency_s = 0.020;
  double message_delay_s = 0.005;
  RouteTiming route_timing;

  std::vector<FaultSpec> faults;
  bool trajectories = false;

  /// Throws LoadError naming the offending field.
  void validate() const;
};

/// Reads the scenario JSON; paths inside it resolve against its directory.
/// Unknown keys are rejected at every level.
Scenario load_scenario(const std::filesystem::path& path);

std::string fire_polygons_to_geojson(std::span<const FirePolygon> polys);
std::string safe_locations_to_geojson(std::span<const GeoPoint> safes);

/// Writes scenario.json plus fires.geojson, safe_locations.geojson,
/// graph.json and, for grid elevation, elevation.json into `dir`, so that
/// load_scenario(dir / "scenario.json") reproduces the scenario.
void save_scenario(const Scenario& sc, const std::filesystem::path& dir);

}  // namespace firescape
