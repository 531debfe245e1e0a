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

#include "firescape/geo.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// x = lon, y = lat
double cross(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

int orientation(const GeoPoint& o, const GeoPoint& a, const GeoPoint& b) {
  const double c = cross(o, a, b);
  return (c > 0) - (c < 0);
}

// p collinear with [a, b] assumed.
bool within_box(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
  return cross(a, b, p) == 0.0 && within_box(p, a, b);
}

bool on_ring_boundary(const GeoPoint& p, const Ring& ring) {
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (on_segment(p, ring[i], ring[(i + 1) % n])) return true;
  }
  return false;
}

// Even-odd crossing count; boundary points must be filtered by the caller.
bool crossing_inside(const GeoPoint& p, const Ring& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[j];
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon;
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

bool strictly_inside_ring(const GeoPoint& p, const Ring& ring) {
  if (ring.size() < 3) return false;
  if (on_ring_boundary(p, ring)) return false;
  return crossing_inside(p, ring);
}

void validate_ring(const Ring& ring, const std::string& name, std::string_view which) {
  if (ring.size() < 3) {
    throw LoadError(fmt::format("polygon '{}': {} ring has {} vertices, need at least 3", name, which,
                                ring.size()));
  }
  for (const GeoPoint& p : ring) {
    if (!is_valid(p)) {
      throw LoadError(fmt::format("polygon '{}': {} ring has out-of-range coordinate ({}, {})", name,
                                  which, p.lat, p.lon));
    }
  }
  if (!is_simple_ring(ring)) {
    throw LoadError(fmt::format("polygon '{}': {} ring is self-intersecting", name, which));
  }
}

}  // namespace

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw ContractViolation(fmt::format("invalid coordinate ({}, {})", p.lat, p.lon));
  }
}

double haversine(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat * kDegToRad;
  const double phi2 = b.lat * kDegToRad;
  const double dphi = (b.lat - a.lat) * kDegToRad;
  const double dlambda = (b.lon - a.lon) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  const double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ContractViolation(fmt::format("interpolation fraction {} outside [0, 1]", fraction));
  }
  if (fraction == 0.0) return a;
  if (fraction == 1.0) return b;
  return GeoPoint{a.lat + (b.lat - a.lat) * fraction, a.lon + (b.lon - a.lon) * fraction};
}

bool point_in_polygon(const GeoPoint& p, const FirePolygon& poly) {
  if (!strictly_inside_ring(p, poly.exterior)) return false;
  for (const Ring& hole : poly.holes) {
    if (hole.size() < 3) continue;
    // Hole boundary belongs to the unburned island, so it is outside too.
    if (on_ring_boundary(p, hole) || crossing_inside(p, hole)) return false;
  }
  return true;
}

bool point_in_any(const GeoPoint& p, std::span<const FirePolygon> polys) {
  return std::any_of(polys.begin(), polys.end(), [&](const FirePolygon& f) { return point_in_polygon(p, f); });
}

bool segments_intersect(const GeoPoint& a1, const GeoPoint& a2, const GeoPoint& b1, const GeoPoint& b2) {
  const int o1 = orientation(a1, a2, b1);
  const int o2 = orientation(a1, a2, b2);
  const int o3 = orientation(b1, b2, a1);
  const int o4 = orientation(b1, b2, a2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && within_box(b1, a1, a2)) return true;
  if (o2 == 0 && within_box(b2, a1, a2)) return true;
  if (o3 == 0 && within_box(a1, b1, b2)) return true;
  if (o4 == 0 && within_box(a2, b1, b2)) return true;
  return false;
}

bool segment_crosses_polygon(const GeoPoint& a, const GeoPoint& b, const FirePolygon& poly) {
  auto crosses = [&](const Ring& ring) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (segments_intersect(a, b, ring[i], ring[(i + 1) % n])) return true;
    }
    return false;
  };
  if (crosses(poly.exterior)) return true;
  return std::any_of(poly.holes.begin(), poly.holes.end(), crosses);
}

bool is_simple_ring(std::span<const GeoPoint> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (ring[i] == ring[(i + 1) % n]) return false;
  }
  if (n == 3) return orientation(ring[0], ring[1], ring[2]) != 0;

  // Sweep over edges sorted by their west-most longitude.
  struct Span {
    double lo, hi;
    std::size_t edge;
  };
  std::vector<Span> spans;
  spans.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    spans.push_back({std::min(a.lon, b.lon), std::max(a.lon, b.lon), i});
  }
  std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
    return x.lo < y.lo || (x.lo == y.lo && x.edge < y.edge);
  });
  for (std::size_t s = 0; s < n; ++s) {
    const std::size_t i = spans[s].edge;
    for (std::size_t t = s + 1; t < n && spans[t].lo <= spans[s].hi; ++t) {
      const std::size_t j = spans[t].edge;
      const bool adjacent = (j == (i + 1) % n) || (i == (j + 1) % n);
      const GeoPoint& a1 = ring[i];
      const GeoPoint& a2 = ring[(i + 1) % n];
      const GeoPoint& b1 = ring[j];
      const GeoPoint& b2 = ring[(j + 1) % n];
      if (adjacent) {
        // Adjacent edges may only share their common vertex; a fold-back
        // along the same line is a degenerate self-overlap.
        const GeoPoint& shared = (j == (i + 1) % n) ? a2 : a1;
        const GeoPoint& far_a = (j == (i + 1) % n) ? a1 : a2;
        const GeoPoint& far_b = (j == (i + 1) % n) ? b2 : b1;
        if (orientation(far_a, shared, far_b) == 0) {
          const bool folds = (far_a.lon - shared.lon) * (far_b.lon - shared.lon) +
                                 (far_a.lat - shared.lat) * (far_b.lat - shared.lat) >
                             0.0;
          if (folds) return false;
        }
        continue;
      }
      if (segments_intersect(a1, a2, b1, b2)) return false;
    }
  }
  return true;
}

void validate_polygon(const FirePolygon& poly) {
  validate_ring(poly.exterior, poly.name, "exterior");
  for (std::size_t h = 0; h < poly.holes.size(); ++h) {
    validate_ring(poly.holes[h], poly.name, fmt::format("hole {}", h));
  }
}

BoundingBox bounding_box(std::span<const GeoPoint> points) {
  if (points.empty()) throw ContractViolation("bounding box of empty point set");
  BoundingBox box{points[0].lat, points[0].lat, points[0].lon, points[0].lon};
  for (const GeoPoint& p : points) {
    box.min_lat = std::min(box.min_lat, p.lat);
    box.max_lat = std::max(box.max_lat, p.lat);
    box.min_lon = std::min(box.min_lon, p.lon);
    box.max_lon = std::max(box.max_lon, p.lon);
  }
  return box;
}

BoundingBox bounding_box(std::span<const FirePolygon> polys) {
  std::vector<GeoPoint> all;
  for (const FirePolygon& f : polys) all.insert(all.end(), f.exterior.begin(), f.exterior.end());
  return bounding_box(std::span<const GeoPoint>(all));
}

}  // namespace firescape
