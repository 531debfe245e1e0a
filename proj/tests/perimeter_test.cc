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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "firescape/errors.h"
#include "support.h"

namespace firescape {
namespace {

const GeoPoint kCenter{34.07, -118.74};

double max_gap(const std::vector<GeoPoint>& ring) {
  double worst = 0.0;
  for (std::size_t i = 0; i < ring.size(); ++i) worst = std::max(worst, haversine(ring[i], ring[(i + 1) % ring.size()]));
  return worst;
}

TEST(Densify, SquareEdgeCounts) {
  // 100 m sides at 10 m spacing: 9 interior points per side.
  const FirePolygon sq{{offset_m(kCenter, 0, 0), offset_m(kCenter, 0, 100), offset_m(kCenter, 100, 100),
                        offset_m(kCenter, 100, 0)},
                       {},
                       "sq"};
  const auto wp = densify_perimeter(sq).pooled();
  EXPECT_GE(wp.size(), 40u);
  EXPECT_LE(wp.size(), 44u);
  EXPECT_LE(max_gap(wp), 10.0);
  // Original vertices are preserved in order.
  EXPECT_EQ(wp.front(), sq.exterior[0]);
}

TEST(Densify, ShortEdgesGetNoInteriorPoints) {
  const FirePolygon tri{{offset_m(kCenter, 0, 0), offset_m(kCenter, 0, 5), offset_m(kCenter, 4, 2)}, {}, "t"};
  EXPECT_EQ(densify_perimeter(tri).pooled().size(), 3u);
}

TEST(Densify, RandomPolygonsRespectSpacing) {
  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const FirePolygon poly = testing::random_star_polygon(rng, kCenter, 30, 2000, 3 + rng.index(40));
    const auto ring = densify_perimeter(poly).rings.at(0);
    EXPECT_LE(max_gap(ring), kDefaultWaypointSpacingM) << "trial " << trial;
    // Each edge needs at least ceil(L / s) segments.
    std::size_t lower = 0;
    for (std::size_t i = 0; i < poly.exterior.size(); ++i) {
      lower += static_cast<std::size_t>(
          std::max(1.0, std::ceil(haversine(poly.exterior[i], poly.exterior[(i + 1) % poly.exterior.size()]) / 10.0)));
    }
    EXPECT_GE(ring.size(), lower);
    EXPECT_LE(ring.size(), lower + poly.exterior.size());
  }
}

TEST(Densify, RejectsDegenerateInput) {
  const FirePolygon pt{{kCenter, kCenter, kCenter}, {}, "p"};
  EXPECT_THROW(densify_perimeter(pt), Error);
  const FirePolygon ok{{offset_m(kCenter, 0, 0), offset_m(kCenter, 0, 50), offset_m(kCenter, 50, 0)}, {}, "t"};
  EXPECT_THROW(densify_perimeter(ok, 0.0), ContractViolation);
}

TEST(Assign, MatchesBruteForceNearestCentroid) {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const FirePolygon poly = testing::random_star_polygon(rng, kCenter, 100, 1500, 5 + rng.index(20));
    const auto wp = densify_perimeter(poly).pooled();
    const std::size_t k = 1 + rng.index(std::min<std::size_t>(30, wp.size()));
    const SdAssignment a = assign_waypoints(wp, k, 1000 + trial);
    ASSERT_EQ(a.clusters.size(), k);

    std::vector<int> owner(wp.size(), -1);
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t idx : a.clusters[c].indices) {
        ASSERT_EQ(owner[idx], -1) << "waypoint assigned twice";
        owner[idx] = static_cast<int>(c);
      }
    }
    for (std::size_t i = 0; i < wp.size(); ++i) {
      ASSERT_NE(owner[i], -1) << "waypoint unassigned";
      int expect = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = haversine(wp[i], a.clusters[c].centroid);
        if (d < best) {
          best = d;
          expect = static_cast<int>(c);
        }
      }
      EXPECT_EQ(owner[i], expect);
    }
    EXPECT_EQ(a.waypoint_count(), wp.size());
  }
}

TEST(Assign, CentroidsAreDistinctWaypoints) {
  Rng rng(5);
  const FirePolygon poly = testing::random_star_polygon(rng, kCenter, 200, 400, 8);
  const auto wp = densify_perimeter(poly).pooled();
  const SdAssignment a = assign_waypoints(wp, 10, 77);
  std::set<std::pair<double, double>> seen;
  for (const auto& c : a.clusters) {
    EXPECT_TRUE(seen.insert({c.centroid.lat, c.centroid.lon}).second);
    // A centroid is its own nearest centroid, so no cluster is empty.
    EXPECT_FALSE(c.indices.empty());
  }
}

TEST(Assign, SeededAndRejectsTooManyDrones) {
  const FirePolygon tri{{offset_m(kCenter, 0, 0), offset_m(kCenter, 0, 30), offset_m(kCenter, 30, 0)}, {}, "t"};
  const auto wp = densify_perimeter(tri).pooled();
  const auto a = assign_waypoints(wp, 3, 9);
  const auto b = assign_waypoints(wp, 3, 9);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.clusters[c].indices, b.clusters[c].indices);
  EXPECT_THROW(assign_waypoints(wp, wp.size() + 1, 9), ContractViolation);
  EXPECT_THROW(assign_waypoints(wp, 0, 9), ContractViolation);
}

TEST(SampleIndices, DistinctAndInRange) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto idx = sample_indices(50, 20, seed);
    std::set<std::size_t> s(idx.begin(), idx.end());
    EXPECT_EQ(s.size(), 20u);
    EXPECT_LT(*s.rbegin(), 50u);
  }
  EXPECT_THROW(sample_indices(3, 4, 1), ContractViolation);
}

TEST(Feasibility, TourAgainstEndurance) {
  SdAssignment a;
  Cluster c;
  c.sd = SdId{0};
  c.waypoints = {offset_m(kCenter, 0, 0), offset_m(kCenter, 0, 1000)};
  a.clusters.push_back(c);
  const EnergyModel model{100.0, 5.0};  // 500 m of flight
  const auto r = check_feasibility(a, model);
  EXPECT_FALSE(r.all_feasible);
  EXPECT_NEAR(r.drones[0].tour_m, 1000.0, 0.5);
  EXPECT_NEAR(r.drones[0].duration_s, 200.0, 0.1);
  EXPECT_TRUE(check_feasibility(a, {300.0, 5.0}).all_feasible);
  // Base station transit adds the leg to the first waypoint.
  const auto with_bs = check_feasibility(a, {300.0, 5.0}, offset_m(kCenter, -500, 0));
  EXPECT_NEAR(with_bs.drones[0].tour_m, 1500.0, 1.0);
  EXPECT_THROW(check_feasibility(a, {0.0, 5.0}), ContractViolation);
}

TEST(FarthestFirst, EachPickMaximizesMinDistance) {
  Rng rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + rng.index(199);
    std::vector<GeoPoint> cand;
    for (std::size_t i = 0; i < n; ++i) cand.push_back(offset_m(kCenter, rng.uniform(0, 3000), rng.uniform(0, 3000)));
    const std::size_t count = 1 + rng.index(std::min<std::size_t>(n, 12));
    const std::size_t first = rng.index(n);
    const auto picks = farthest_first(cand, count, first);
    ASSERT_EQ(picks.size(), count);
    EXPECT_EQ(picks[0], first);
    for (std::size_t p = 1; p < count; ++p) {
      auto min_to_prefix = [&](std::size_t i) {
        double m = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < p; ++q) m = std::min(m, haversine(cand[i], cand[picks[q]]));
        return m;
      };
      double best = -1.0;
      std::size_t best_i = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(picks.begin(), picks.begin() + static_cast<long>(p), i) != picks.begin() + static_cast<long>(p)) {
          continue;
        }
        const double d = min_to_prefix(i);
        if (d > best) {
          best = d;
          best_i = i;
        }
      }
      EXPECT_EQ(picks[p], best_i) << "trial " << trial << " pick " << p;
    }
  }
}

TEST(PlaceCoordinators, DistinctAndSeeded) {
  Rng rng(6);
  const std::vector<FirePolygon> fires{testing::random_star_polygon(rng, kCenter, 500, 900, 10)};
  const auto cand = sample_candidates(fires, 200, 4);
  ASSERT_EQ(cand.size(), 200u);
  for (const auto& p : cand) EXPECT_TRUE(point_in_any(p, fires));
  const auto hovers = place_coordinators(cand, 3, 12);
  EXPECT_EQ(hovers.size(), 3u);
  EXPECT_EQ(hovers, place_coordinators(cand, 3, 12));
  EXPECT_THROW(place_coordinators(cand, 0, 1), ContractViolation);
  EXPECT_THROW(place_coordinators(cand, 201, 1), ContractViolation);
}

TEST(SampleCandidates, FailsWhenPolygonIsSliver) {
  // A sliver whose area is a vanishing fraction of its bounding box.
  const FirePolygon sliver{{{0, 0}, {1, 1}, {1, 1.0000000001}}, {}, "sliver"};
  const std::vector<FirePolygon> fires{sliver};
  EXPECT_THROW(sample_candidates(fires, 5, 1), Error);
}

}  // namespace
}  // namespace firescape
