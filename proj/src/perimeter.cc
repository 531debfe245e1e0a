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

#include "firescape/perimeter.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "firescape/rng.h"

namespace firescape {
namespace {

// Smallest segment count whose equal subdivisions of [a, b] all measure at
// most max_spacing_m. Linear lat/lon subdivision is not exactly uniform in
// haversine terms, so the ceiling estimate is verified and bumped if needed.
std::size_t segment_count(const GeoPoint& a, const GeoPoint& b, double max_spacing_m) {
  const double length = haversine(a, b);
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(length / max_spacing_m)));
  for (;; ++k) {
    bool ok = true;
    GeoPoint prev = a;
    for (std::size_t i = 1; i <= k && ok; ++i) {
      const GeoPoint next = i == k ? b : interpolate(a, b, static_cast<double>(i) / static_cast<double>(k));
      ok = haversine(prev, next) <= max_spacing_m;
      prev = next;
    }
    if (ok) return k;
  }
}

}  // namespace

std::vector<GeoPoint> PerimeterWaypoints::pooled() const {
  std::vector<GeoPoint> all;
  for (const auto& ring : rings) all.insert(all.end(), ring.begin(), ring.end());
  return all;
}

std::vector<GeoPoint> densify_ring(std::span<const GeoPoint> ring, double max_spacing_m) {
  if (!(max_spacing_m > 0.0)) {
    throw ContractViolation(fmt::format("max_spacing_m must be positive, got {}", max_spacing_m));
  }
  const std::size_t n = ring.size();
  double perimeter = 0.0;
  for (std::size_t i = 0; i < n; ++i) perimeter += haversine(ring[i], ring[(i + 1) % n]);
  if (n < 2 || !(perimeter > 0.0)) throw Error("cannot densify a degenerate polygon with zero-length perimeter");

  std::vector<GeoPoint> out;
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    out.push_back(a);
    const std::size_t k = segment_count(a, b, max_spacing_m);
    for (std::size_t j = 1; j < k; ++j) {
      out.push_back(interpolate(a, b, static_cast<double>(j) / static_cast<double>(k)));
    }
  }
  return out;
}

PerimeterWaypoints densify_perimeter(const FirePolygon& poly, double max_spacing_m) {
  return PerimeterWaypoints{{densify_ring(poly.exterior, max_spacing_m)}};
}

PerimeterWaypoints densify_perimeter(std::span<const FirePolygon> polys, double max_spacing_m) {
  PerimeterWaypoints out;
  for (const auto& poly : polys) out.rings.push_back(densify_ring(poly.exterior, max_spacing_m));
  return out;
}

std::size_t SdAssignment::waypoint_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.indices.size();
  return n;
}

SdAssignment assign_to_centroids(std::span<const GeoPoint> waypoints, std::span<const std::size_t> centroid_indices,
                                 std::span<const SdId> sds) {
  if (centroid_indices.size() != sds.size()) {
    throw ContractViolation("assign_to_centroids: one centroid per drone required");
  }
  SdAssignment out;
  out.clusters.resize(sds.size());
  for (std::size_t k = 0; k < sds.size(); ++k) {
    if (centroid_indices[k] >= waypoints.size()) throw ContractViolation("centroid index out of range");
    out.clusters[k].sd = sds[k];
    out.clusters[k].centroid = waypoints[centroid_indices[k]];
  }
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < out.clusters.size(); ++k) {
      const double d = haversine(waypoints[i], out.clusters[k].centroid);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    out.clusters[best].indices.push_back(i);
    out.clusters[best].waypoints.push_back(waypoints[i]);
  }
  return out;
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count, std::uint64_t seed) {
  if (count > population) throw ContractViolation("cannot sample more indices than the population");
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.index(population - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

SdAssignment assign_waypoints(std::span<const GeoPoint> waypoints, std::span<const SdId> sds, std::uint64_t seed) {
  if (sds.empty()) throw ContractViolation("assign_waypoints: need at least one service drone");
  if (sds.size() > waypoints.size()) {
    throw ContractViolation(fmt::format(
        "{} service drones but only {} perimeter waypoints; use fewer drones or a finer waypoint spacing", sds.size(),
        waypoints.size()));
  }
  const auto centroids = sample_indices(waypoints.size(), sds.size(), seed);
  return assign_to_centroids(waypoints, centroids, sds);
}

SdAssignment assign_waypoints(std::span<const GeoPoint> waypoints, std::size_t sd_count, std::uint64_t seed) {
  std::vector<SdId> sds(sd_count);
  for (std::size_t i = 0; i < sd_count; ++i) sds[i] = SdId{static_cast<int>(i)};
  return assign_waypoints(waypoints, std::span<const SdId>(sds), seed);
}

void EnergyModel::validate() const {
  if (!(flight_endurance_s > 0.0) || !(speed_mps > 0.0)) {
    throw ContractViolation(
        fmt::format("energy model needs positive endurance and speed ({} s, {} m/s)", flight_endurance_s, speed_mps));
  }
}

double tour_length(std::span<const GeoPoint> waypoints) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) total += haversine(waypoints[i], waypoints[i + 1]);
  return total;
}

FeasibilityReport check_feasibility(const SdAssignment& assignment, const EnergyModel& model,
                                    std::optional<GeoPoint> base_station) {
  model.validate();
  FeasibilityReport report;
  for (const auto& c : assignment.clusters) {
    DroneFeasibility d;
    d.sd = c.sd;
    d.tour_m = tour_length(c.waypoints);
    if (base_station && !c.waypoints.empty()) d.tour_m += haversine(*base_station, c.waypoints.front());
    d.duration_s = d.tour_m / model.speed_mps;
    d.feasible = d.duration_s <= model.flight_endurance_s;
    report.all_feasible = report.all_feasible && d.feasible;
    report.drones.push_back(d);
  }
  return report;
}

std::vector<std::size_t> farthest_first(std::span<const GeoPoint> candidates, std::size_t count, std::size_t first) {
  if (count == 0 || count > candidates.size()) {
    throw ContractViolation(
        fmt::format("farthest_first: need 1..{} picks, asked for {}", candidates.size(), count));
  }
  if (first >= candidates.size()) throw ContractViolation("farthest_first: first index out of range");
  const std::size_t n = candidates.size();
  std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> picks{first};
  taken[first] = true;
  while (picks.size() < count) {
    const GeoPoint& last = candidates[picks.back()];
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(min_dist[i], haversine(candidates[i], last));
      if (min_dist[i] > best_d) {
        best_d = min_dist[i];
        best = i;
      }
    }
    taken[best] = true;
    picks.push_back(best);
  }
  return picks;
}

std::vector<GeoPoint> place_coordinators(std::span<const GeoPoint> candidates, std::size_t cd_count,
                                         std::uint64_t seed) {
  if (cd_count == 0) throw ContractViolation("place_coordinators: need at least one coordinator drone");
  if (candidates.size() < cd_count) {
    throw ContractViolation(fmt::format("place_coordinators: {} candidates for {} coordinator drones",
                                        candidates.size(), cd_count));
  }
  Rng rng(seed);
  const auto picks = farthest_first(candidates, cd_count, rng.index(candidates.size()));
  std::vector<GeoPoint> out;
  out.reserve(picks.size());
  for (std::size_t i : picks) out.push_back(candidates[i]);
  return out;
}

std::vector<GeoPoint> sample_candidates(std::span<const FirePolygon> polys, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ContractViolation("sample_candidates: n must be >= 1");
  if (polys.empty()) throw ContractViolation("sample_candidates: no fire polygons");
  const BoundingBox box = bounding_box(polys);
  Rng rng(seed);
  std::vector<GeoPoint> out;
  out.reserve(n);
  const std::size_t max_attempts = 1000 * n;
  for (std::size_t attempt = 0; attempt < max_attempts && out.size() < n; ++attempt) {
    const GeoPoint p{rng.uniform(box.min_lat, box.max_lat), rng.uniform(box.min_lon, box.max_lon)};
    if (point_in_any(p, polys)) out.push_back(p);
  }
  if (out.size() < n) {
    throw Error(fmt::format("sample_candidates: only {} of {} points landed inside the fire polygons after {} draws",
                            out.size(), n, max_attempts));
  }
  return out;
}

}  // namespace firescape
