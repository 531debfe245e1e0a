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

// Geodetic primitives on a spherical Earth. Containment and segment tests
// work in planar lat/lon space, which is adequate at wildfire scale.

#pragma once

#include <span>
#include <string>
#include <vector>

namespace firescape {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(const GeoPoint& p);

/// Throws ContractViolation if p is out of range or not finite.
void validate(const GeoPoint& p);

/// Closed ring without the repeated closing vertex.
using Ring = std::vector<GeoPoint>;

struct FirePolygon {
  Ring exterior;
  std::vector<Ring> holes;
  std::string name;
};

/// Rejects rings with fewer than 3 vertices, invalid coordinates, or
/// self-intersections. Throws LoadError naming the polygon.
void validate_polygon(const FirePolygon& poly);

/// True if the closed ring has no two non-adjacent edges touching.
bool is_simple_ring(std::span<const GeoPoint> ring);

/// Great-circle distance in meters.
double haversine(const GeoPoint& a, const GeoPoint& b);

/// Linear blend in lat/lon space. fraction must lie in [0, 1].
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double fraction);

/// Strict interior test: points on an edge or vertex are outside, as are
/// points inside a hole (or on a hole boundary).
bool point_in_polygon(const GeoPoint& p, const FirePolygon& poly);

bool point_in_any(const GeoPoint& p, std::span<const FirePolygon> polys);

/// Planar segment intersection, touching endpoints included.
bool segments_intersect(const GeoPoint& a1, const GeoPoint& a2, const GeoPoint& b1, const GeoPoint& b2);

/// True if segment [a, b] touches any ring edge of poly.
bool segment_crosses_polygon(const GeoPoint& a, const GeoPoint& b, const FirePolygon& poly);

struct BoundingBox {
  double min_lat = 0.0;
  double max_lat = 0.0;
  double min_lon = 0.0;
  double max_lon = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lat >= min_lat && p.lat <= max_lat && p.lon >= min_lon && p.lon <= max_lon;
  }
};

/// Box around the exteriors of all polygons. Requires a non-empty input.
BoundingBox bounding_box(std::span<const FirePolygon> polys);
BoundingBox bounding_box(std::span<const GeoPoint> points);

}  // namespace firescape
