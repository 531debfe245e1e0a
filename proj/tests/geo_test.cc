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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "firescape/errors.h"
#include "firescape/rng.h"
#include "support.h"

namespace firescape {
namespace {

constexpr double kRad = std::numbers::pi / 180.0;

double law_of_cosines(const GeoPoint& a, const GeoPoint& b) {
  const double c = std::sin(a.lat * kRad) * std::sin(b.lat * kRad) +
                   std::cos(a.lat * kRad) * std::cos(b.lat * kRad) * std::cos((b.lon - a.lon) * kRad);
  return kEarthRadiusM * std::acos(std::clamp(c, -1.0, 1.0));
}

// Winding number in the lat/lon plane.
int winding_number(const GeoPoint& p, const Ring& ring) {
  int wn = 0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    const double side = (b.lon - a.lon) * (p.lat - a.lat) - (p.lon - a.lon) * (b.lat - a.lat);
    if (a.lat <= p.lat) {
      if (b.lat > p.lat && side > 0) ++wn;
    } else {
      if (b.lat <= p.lat && side < 0) --wn;
    }
  }
  return wn;
}

FirePolygon square(double lat0, double lon0, double size) {
  return {{{lat0, lon0}, {lat0, lon0 + size}, {lat0 + size, lon0 + size}, {lat0 + size, lon0}}, {}, "sq"};
}

TEST(Haversine, ZeroForSamePoint) { EXPECT_EQ(haversine({10, 20}, {10, 20}), 0.0); }

TEST(Haversine, OneDegreeOfLatitude) {
  EXPECT_NEAR(haversine({0, 0}, {1, 0}), kEarthRadiusM * kRad, 1e-6);
}

TEST(Haversine, MatchesLawOfCosines) {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    GeoPoint a{rng.uniform(-80, 80), rng.uniform(-179, 179)};
    GeoPoint b{rng.uniform(-80, 80), rng.uniform(-179, 179)};
    const double ref = law_of_cosines(a, b);
    EXPECT_NEAR(haversine(a, b), ref, 1e-6 * ref + 1e-3);
  }
}

TEST(Haversine, SymmetricAndTriangle) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    GeoPoint a{rng.uniform(30, 40), rng.uniform(-125, -115)};
    GeoPoint b{rng.uniform(30, 40), rng.uniform(-125, -115)};
    GeoPoint c{rng.uniform(30, 40), rng.uniform(-125, -115)};
    EXPECT_DOUBLE_EQ(haversine(a, b), haversine(b, a));
    EXPECT_LE(haversine(a, c), haversine(a, b) + haversine(b, c) + 1e-6);
  }
}

TEST(Interpolate, EndpointsExact) {
  const GeoPoint a{34.1, -118.3};
  const GeoPoint b{34.2, -118.1};
  EXPECT_EQ(interpolate(a, b, 0.0), a);
  EXPECT_EQ(interpolate(a, b, 1.0), b);
  const GeoPoint mid = interpolate(a, b, 0.5);
  EXPECT_DOUBLE_EQ(mid.lat, 34.15);
  EXPECT_DOUBLE_EQ(mid.lon, -118.2);
  EXPECT_THROW(interpolate(a, b, 1.5), ContractViolation);
  EXPECT_THROW(interpolate(a, b, -0.1), ContractViolation);
}

TEST(Validate, RejectsOutOfRange) {
  EXPECT_NO_THROW(validate({90, 180}));
  EXPECT_THROW(validate({91, 0}), ContractViolation);
  EXPECT_THROW(validate({0, -181}), ContractViolation);
  EXPECT_THROW(validate({NAN, 0}), ContractViolation);
}

TEST(PointInPolygon, SquareInteriorBoundaryExterior) {
  const FirePolygon sq = square(0, 0, 1);
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({1.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({0.0, 0.5}, sq));  // on an edge
  EXPECT_FALSE(point_in_polygon({1.0, 1.0}, sq));  // on a vertex
}

TEST(PointInPolygon, HoleIsOutside) {
  FirePolygon sq = square(0, 0, 4);
  sq.holes.push_back(square(1, 1, 2).exterior);
  EXPECT_TRUE(point_in_polygon({0.5, 0.5}, sq));
  EXPECT_FALSE(point_in_polygon({2, 2}, sq));
  EXPECT_FALSE(point_in_polygon({1, 2}, sq));  // hole boundary
}

TEST(PointInPolygon, AgreesWithWindingNumber) {
  Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const GeoPoint c{rng.uniform(-60, 60), rng.uniform(-170, 170)};
    const FirePolygon poly = testing::random_star_polygon(rng, c, 50, 1000, 3 + rng.index(30));
    ASSERT_TRUE(is_simple_ring(poly.exterior));
    for (int k = 0; k < 200; ++k) {
      const GeoPoint p = offset_m(c, rng.uniform(-1100, 1100), rng.uniform(-1100, 1100));
      EXPECT_EQ(point_in_polygon(p, poly), winding_number(p, poly.exterior) != 0);
    }
  }
}

TEST(PointInAny, AnyOfSeveral) {
  std::vector<FirePolygon> fires{square(0, 0, 1), square(5, 5, 1)};
  EXPECT_TRUE(point_in_any({5.5, 5.5}, fires));
  EXPECT_FALSE(point_in_any({3, 3}, fires));
}

TEST(Segments, CrossingTouchingDisjoint) {
  EXPECT_TRUE(segments_intersect({0, 0}, {1, 1}, {0, 1}, {1, 0}));
  EXPECT_TRUE(segments_intersect({0, 0}, {1, 0}, {1, 0}, {2, 5}));
  EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
  EXPECT_TRUE(segment_crosses_polygon({0.5, -1}, {0.5, 2}, square(0, 0, 1)));
  EXPECT_FALSE(segment_crosses_polygon({2, -1}, {2, 2}, square(0, 0, 1)));
}

TEST(SimpleRing, Cases) {
  EXPECT_TRUE(is_simple_ring(square(0, 0, 1).exterior));
  const Ring bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
  EXPECT_FALSE(is_simple_ring(bowtie));
  const Ring collinear{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_FALSE(is_simple_ring(collinear));
  const Ring fold{{0, 0}, {2, 0}, {1, 0}, {1, 1}};
  EXPECT_FALSE(is_simple_ring(fold));
  const Ring two{{0, 0}, {1, 1}};
  EXPECT_FALSE(is_simple_ring(two));
}

TEST(ValidatePolygon, NamesPolygon) {
  FirePolygon bad{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {}, "bowtie"};
  try {
    validate_polygon(bad);
    FAIL() << "expected LoadError";
  } catch (const LoadError& e) {
    EXPECT_NE(std::string(e.what()).find("bowtie"), std::string::npos);
  }
  FirePolygon small{{{0, 0}, {1, 1}}, {}, "tiny"};
  EXPECT_THROW(validate_polygon(small), LoadError);
  EXPECT_NO_THROW(validate_polygon(square(0, 0, 1)));
}

TEST(BoundingBox, CoversAllVertices) {
  std::vector<FirePolygon> fires{square(0, 0, 1), square(-3, 4, 2)};
  const BoundingBox box = bounding_box(std::span<const FirePolygon>(fires));
  EXPECT_EQ(box.min_lat, -3);
  EXPECT_EQ(box.max_lat, 1);
  EXPECT_EQ(box.min_lon, 0);
  EXPECT_EQ(box.max_lon, 6);
  EXPECT_THROW(bounding_box(std::span<const GeoPoint>()), ContractViolation);
}

}  // namespace
}  // namespace firescape
