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

#include "firescape/router.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_set>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct OpenEntry {
  double f;
  std::uint64_t seq;
  std::size_t node;
  double g;
};

// Min-heap on (f, seq): equal f pops first-in first-out.
struct OpenOrder {
  bool operator()(const OpenEntry& a, const OpenEntry& b) const {
    if (a.f != b.f) return a.f > b.f;
    return a.seq > b.seq;
  }
};

}  // namespace

void CostWeights::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 || beta < 0.0) {
    throw ContractViolation(fmt::format("cost weights must be finite and >= 0 (alpha={}, beta={})", alpha, beta));
  }
  if (alpha == 0.0 && beta == 0.0) throw ContractViolation("cost weights alpha and beta cannot both be zero");
}

std::optional<Route> astar(const GroundGraph& g, std::size_t source, std::size_t target, const CostWeights& w,
                           std::size_t* expansions) {
  const std::size_t n = g.node_count();
  if (source >= n || target >= n) throw ContractViolation("astar: node index out of range");
  const GeoPoint goal_pos = g.node(target).pos;
  auto heuristic = [&](std::size_t v) { return w.alpha * haversine(g.node(v).pos, goal_pos); };

  std::vector<double> best(n, kInf);
  std::vector<std::size_t> parent_node(n, kNone);
  std::vector<std::size_t> parent_edge(n, kNone);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, OpenOrder> open;
  std::uint64_t seq = 0;

  best[source] = 0.0;
  open.push({heuristic(source), seq++, source, 0.0});
  bool reached = false;
  while (!open.empty()) {
    const OpenEntry cur = open.top();
    open.pop();
    if (cur.g > best[cur.node]) continue;  // stale
    if (expansions != nullptr) ++*expansions;
    if (cur.node == target) {
      reached = true;
      break;
    }
    for (const auto& arc : g.arcs(cur.node)) {
      const double cand = cur.g + w.alpha * arc.length_m + w.beta * arc.gain_m;
      if (cand < best[arc.to]) {
        best[arc.to] = cand;
        parent_node[arc.to] = cur.node;
        parent_edge[arc.to] = arc.edge;
        open.push({cand + heuristic(arc.to), seq++, arc.to, cand});
      }
    }
  }
  if (!reached) return std::nullopt;

  std::vector<std::size_t> path;
  std::vector<double> legs;
  for (std::size_t v = target; v != source; v = parent_node[v]) {
    path.push_back(v);
    legs.push_back(g.edges()[parent_edge[v]].length_m);
  }
  path.push_back(source);
  std::reverse(path.begin(), path.end());
  std::reverse(legs.begin(), legs.end());

  Route r;
  r.cost = best[target];
  r.leg_lengths_m = std::move(legs);
  r.length_m = std::accumulate(r.leg_lengths_m.begin(), r.leg_lengths_m.end(), 0.0);
  for (std::size_t v : path) {
    r.waypoints.push_back(g.node(v).pos);
    r.node_ids.push_back(g.node(v).id);
  }
  return r;
}

PlanResult plan_escape_route(const GroundGraph& g, const GeoPoint& origin, std::span<const GeoPoint> safes,
                             const CostWeights& w) {
  if (safes.empty()) throw ContractViolation("plan_escape_route: no safe locations given");
  if (g.empty()) throw ContractViolation("plan_escape_route: empty graph, no routable terrain");
  w.validate();

  const std::size_t origin_node = nearest_node(g, origin);
  struct Goal {
    std::size_t safe_index;
    std::size_t node;
    double key;
  };
  std::vector<Goal> goals;
  goals.reserve(safes.size());
  for (std::size_t i = 0; i < safes.size(); ++i) {
    const std::size_t node = nearest_node(g, safes[i]);
    goals.push_back({i, node, haversine(g.node(origin_node).pos, g.node(node).pos)});
  }
  std::stable_sort(goals.begin(), goals.end(), [](const Goal& a, const Goal& b) { return a.key < b.key; });

  PlanResult result;
  NoRouteFound failure;
  std::unordered_set<std::size_t> unreachable;
  for (const Goal& goal : goals) {
    failure.attempted_goals.push_back(safes[goal.safe_index]);
    if (unreachable.contains(goal.node)) continue;
    ++result.stats.goals_tried;
    std::optional<Route> route = astar(g, origin_node, goal.node, w, &result.stats.expansions);
    if (route) {
      route->goal = safes[goal.safe_index];
      route->goal_index = goal.safe_index;
      result.outcome = std::move(*route);
      return result;
    }
    unreachable.insert(goal.node);
  }
  result.outcome = std::move(failure);
  return result;
}

double route_length(const Route& r) {
  return std::accumulate(r.leg_lengths_m.begin(), r.leg_lengths_m.end(), 0.0);
}

double route_length(const GroundGraph& g, std::span<const std::string> node_ids) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < node_ids.size(); ++i) {
    auto a = g.find(node_ids[i]);
    auto b = g.find(node_ids[i + 1]);
    if (!a || !b) throw NotFound(fmt::format("route node '{}' not in graph", !a ? node_ids[i] : node_ids[i + 1]));
    double leg = kInf;
    for (const auto& arc : g.arcs(*a)) {
      if (arc.to == *b) leg = std::min(leg, arc.length_m);
    }
    if (leg == kInf) throw NotFound(fmt::format("no edge between '{}' and '{}'", node_ids[i], node_ids[i + 1]));
    total += leg;
  }
  return total;
}

std::size_t count_heuristic_violations(const GroundGraph& g) {
  std::size_t count = 0;
  for (const auto& e : g.edges()) {
    // small slack for coordinates rounded in the source file
    if (e.length_m + 1e-6 < haversine(g.node(e.u).pos, g.node(e.v).pos) * (1.0 - 1e-9)) ++count;
  }
  return count;
}

}  // namespace firescape
