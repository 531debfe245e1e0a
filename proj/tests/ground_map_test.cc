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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "firescape/elevation.h"
#include "firescape/errors.h"
#include "firescape/ground_graph.h"
#include "support.h"

namespace firescape {
namespace {

GroundGraph line_graph() {
  std::vector<GroundGraph::Node> nodes{
      {"a", {0.0, 0.0}, 0}, {"b", {0.0, 0.001}, 0}, {"c", {0.0, 0.002}, 0}, {"d", {0.0, 0.003}, 0}};
  std::vector<GroundGraph::Edge> edges{{0, 1, 111.2, 0, 0}, {1, 2, 111.2, 0, 0}, {2, 3, 111.2, 0, 0}};
  return GroundGraph(nodes, edges);
}

FirePolygon box(double lat0, double lon0, double lat1, double lon1) {
  return {{{lat0, lon0}, {lat0, lon1}, {lat1, lon1}, {lat1, lon0}}, {}, "box"};
}

TEST(Elevation, ConstantAndPlane) {
  EXPECT_EQ(ElevationProvider::constant(12.5).at({34, -118}), 12.5);
  const auto pl = ElevationProvider::plane(100, -50, 7);
  EXPECT_DOUBLE_EQ(pl.at({2, 3}), 100 * 2 - 50 * 3 + 7);
}

TEST(Elevation, GridBilinearReproducesPlane) {
  // A bilinear interpolant of a plane is the plane itself.
  ElevationProvider::Grid g;
  g.origin = {10, 20};
  g.cell_deg = 0.01;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> row;
    for (int j = 0; j < 7; ++j) row.push_back(3.0 * i + 5.0 * j + 1.0);
    g.rows.push_back(row);
  }
  const auto grid = ElevationProvider::grid(g);
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const double fi = rng.uniform(0, 5);
    const double fj = rng.uniform(0, 6);
    EXPECT_NEAR(grid.at({10 + fi * 0.01, 20 + fj * 0.01}), 3.0 * fi + 5.0 * fj + 1.0, 1e-6);
  }
  EXPECT_NEAR(grid.at({10.05, 20.06}), 3.0 * 5 + 5.0 * 6 + 1.0, 1e-9);
  EXPECT_THROW(grid.at({9.9, 20}), Error);
  EXPECT_THROW(grid.at({10, 20.07}), Error);
}

TEST(Elevation, GridShapeValidated) {
  ElevationProvider::Grid g;
  g.origin = {0, 0};
  g.cell_deg = 0.01;
  g.rows = {{1, 2}, {3}};
  EXPECT_THROW(ElevationProvider::grid(g), Error);
  g.rows = {{1, 2}};
  EXPECT_THROW(ElevationProvider::grid(g), Error);
  g.rows = {{1, 2}, {3, 4}};
  g.cell_deg = 0;
  EXPECT_THROW(ElevationProvider::grid(g), Error);
}

TEST(Elevation, LoadGridFixture) {
  const auto grid = ElevationProvider::load_grid(testing::data_dir() / "diamond" / "elevation.json");
  EXPECT_DOUBLE_EQ(grid.at({0, 0.00025}), 50.0);
  EXPECT_DOUBLE_EQ(grid.at({0.0002, 0.00025}), 0.0);
  EXPECT_DOUBLE_EQ(grid.at({0, 0.000225}), 25.0);
}

TEST(GroundGraph, ConstructorRejectsBadInput) {
  std::vector<GroundGraph::Node> nodes{{"a", {0, 0}, 0}, {"b", {0, 0.001}, 0}};
  EXPECT_THROW(GroundGraph(nodes, {{0, 2, 10, 0, 0}}), LoadError);
  EXPECT_THROW(GroundGraph(nodes, {{0, 0, 10, 0, 0}}), LoadError);
  EXPECT_THROW(GroundGraph(nodes, {{0, 1, 0, 0, 0}}), LoadError);
  EXPECT_THROW(GroundGraph(nodes, {{0, 1, 10, -1, 0}}), LoadError);
  std::vector<GroundGraph::Node> dup{{"a", {0, 0}, 0}, {"a", {0, 0.001}, 0}};
  EXPECT_THROW(GroundGraph(dup, {}), LoadError);
}

TEST(GroundGraph, ArcsAreBidirectional) {
  const GroundGraph g = line_graph();
  ASSERT_EQ(g.arcs(1).size(), 2u);
  std::set<std::size_t> to;
  for (const auto& a : g.arcs(1)) to.insert(a.to);
  EXPECT_EQ(to, (std::set<std::size_t>{0, 2}));
  EXPECT_EQ(*g.find("c"), 2u);
  EXPECT_FALSE(g.find("zz").has_value());
}

TEST(Prune, DropsNodesInsideFireAndTheirEdges) {
  const GroundGraph g = line_graph();
  const std::vector<FirePolygon> fires{box(-0.0005, 0.0005, 0.0005, 0.0015)};  // covers b
  const GroundGraph p = prune(g, fires);
  EXPECT_EQ(p.node_count(), 3u);
  EXPECT_FALSE(p.find("b").has_value());
  EXPECT_EQ(p.edge_count(), 1u);  // only c-d survives
  for (const auto& n : p.nodes()) EXPECT_FALSE(point_in_any(n.pos, fires));
}

TEST(Prune, CrossingEdgesOptional) {
  const GroundGraph g = line_graph();
  // Fire between a and b, touching neither node.
  const std::vector<FirePolygon> fires{box(-0.0005, 0.0004, 0.0005, 0.0006)};
  EXPECT_EQ(prune(g, fires).edge_count(), 3u);
  EXPECT_EQ(prune(g, fires, {.crossing_edges = true}).edge_count(), 2u);
}

TEST(Prune, PropertyNoSurvivorInsideAnyFire) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const GroundGraph g = testing::random_graph(rng, 150, 150);
    const GeoPoint c = offset_m({37.0, -120.0}, 1000, 1000);
    const std::vector<FirePolygon> fires{testing::random_star_polygon(rng, c, 200, 700, 12)};
    const GroundGraph p = prune(g, fires);
    std::size_t expected_nodes = 0;
    for (const auto& n : g.nodes()) expected_nodes += point_in_any(n.pos, fires) ? 0 : 1;
    EXPECT_EQ(p.node_count(), expected_nodes);
    for (const auto& n : p.nodes()) EXPECT_FALSE(point_in_any(n.pos, fires));
    std::size_t expected_edges = 0;
    for (const auto& e : g.edges()) {
      expected_edges += (!point_in_any(g.node(e.u).pos, fires) && !point_in_any(g.node(e.v).pos, fires)) ? 1 : 0;
    }
    EXPECT_EQ(p.edge_count(), expected_edges);
  }
}

TEST(Augment, ConstantElevationGivesZeroGain) {
  const GroundGraph g = augment_elevation(line_graph(), ElevationProvider::constant(300), 4);
  for (const auto& e : g.edges()) {
    EXPECT_EQ(e.gain_uv, 0.0);
    EXPECT_EQ(e.gain_vu, 0.0);
  }
  for (const auto& n : g.nodes()) EXPECT_EQ(n.elevation_m, 300.0);
}

TEST(Augment, EndpointGainsArePositivePart) {
  Rng rng(8);
  const GroundGraph base = testing::random_graph(rng, 60, 60);
  const GroundGraph g = augment_elevation(base, ElevationProvider::plane(4000, -2500, 10), 0);
  for (const auto& e : g.edges()) {
    const double dh = g.node(e.v).elevation_m - g.node(e.u).elevation_m;
    EXPECT_DOUBLE_EQ(e.gain_uv, std::max(0.0, dh));
    EXPECT_DOUBLE_EQ(e.gain_vu, std::max(0.0, -dh));
  }
}

TEST(Augment, PiecewiseCatchesHiddenRidge) {
  // The fixture's middle cell peaks at 50 m between two flat endpoints.
  const auto grid = ElevationProvider::load_grid(testing::data_dir() / "diamond" / "elevation.json");
  std::vector<GroundGraph::Node> nodes{{"w", {0, 0.0002}, 0}, {"e", {0, 0.0003}, 0}};
  const GroundGraph g(nodes, {{0, 1, 11, 0, 0}});
  const GroundGraph endpoint = augment_elevation(g, grid, 3, GainMode::kEndpoint);
  EXPECT_NEAR(endpoint.edges()[0].gain_uv, 0.0, 1e-9);
  const GroundGraph piecewise = augment_elevation(g, grid, 3, GainMode::kPiecewise);
  EXPECT_NEAR(piecewise.edges()[0].gain_uv, 50.0, 1e-9);
  EXPECT_NEAR(piecewise.edges()[0].gain_vu, 50.0, 1e-9);
  // Piecewise gain is never below the endpoint gain.
  EXPECT_GE(piecewise.edges()[0].gain_uv, endpoint.edges()[0].gain_uv);
}

TEST(Augment, OutsideGridNamesNode) {
  const auto grid = ElevationProvider::load_grid(testing::data_dir() / "diamond" / "elevation.json");
  std::vector<GroundGraph::Node> nodes{{"inside", {0, 0}, 0}, {"faraway", {1, 1}, 0}};
  const GroundGraph g(nodes, {{0, 1, 200000, 0, 0}});
  try {
    augment_elevation(g, grid, 0);
    FAIL() << "expected Error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("faraway"), std::string::npos);
  }
}

TEST(NearestNode, MatchesLinearScan) {
  Rng rng(9);
  const GroundGraph g = testing::random_graph(rng, 120, 0);
  for (int k = 0; k < 300; ++k) {
    const GeoPoint p = offset_m({37.0, -120.0}, rng.uniform(-200, 2200), rng.uniform(-200, 2200));
    double best = 1e18;
    for (const auto& n : g.nodes()) best = std::min(best, haversine(p, n.pos));
    EXPECT_EQ(haversine(p, g.node(nearest_node(g, p)).pos), best);
  }
  EXPECT_THROW(nearest_node(GroundGraph(), {0, 0}), ContractViolation);
}

}  // namespace
}  // namespace firescape
