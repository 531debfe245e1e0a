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

#include "firescape/walker.h"

#include <algorithm>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {

GeoPoint advance_toward(const GeoPoint& from, const GeoPoint& to, double distance_m) {
  const double total = haversine(from, to);
  if (distance_m >= total) return to;
  if (distance_m <= 0.0) return from;
  // Lat/lon blending is not uniform in arc length; a few fixed-point
  // corrections pin the covered distance to distance_m.
  double gamma = distance_m / total;
  GeoPoint p = interpolate(from, to, gamma);
  for (int i = 0; i < 4; ++i) {
    const double got = haversine(from, p);
    if (got <= 0.0) break;
    gamma = std::min(1.0, gamma * distance_m / got);
    p = interpolate(from, to, gamma);
  }
  while (haversine(from, p) > distance_m && gamma > 0.0) {
    gamma *= 1.0 - 1e-12;
    p = interpolate(from, to, gamma);
  }
  return p;
}

WalkStep step(const WalkState& ws, std::span<const GeoPoint> route, const WalkParams& params) {
  if (route.empty()) throw ContractViolation("guided walk on an empty route");
  if (ws.next_index > route.size()) {
    throw ContractViolation(fmt::format("guided walk index {} past route of {}", ws.next_index, route.size()));
  }
  WalkStep out{ws, 0.0};
  if (ws.arrived) return out;

  WalkState& s = out.state;
  const std::size_t n = route.size();
  const double budget_full = params.speed_mps * params.interval_s;
  const GeoPoint start = s.position;

  if (!params.literal_checkpoints) {
    double budget = budget_full;
    while (s.next_index < n) {
      const double d = haversine(s.position, route[s.next_index]);
      if (d <= budget) {
        out.walked_m += d;
        budget -= d;
        s.position = route[s.next_index];
        ++s.next_index;
        continue;
      }
      const GeoPoint moved = advance_toward(s.position, route[s.next_index], budget);
      out.walked_m += haversine(s.position, moved);
      s.position = moved;
      break;
    }
  } else {
    while (s.next_index < n && haversine(s.position, route[s.next_index]) <= budget_full) ++s.next_index;
    if (s.next_index < n) {
      const double d = haversine(s.position, route[s.next_index]);
      s.position = interpolate(s.position, route[s.next_index], budget_full / d);
    } else {
      s.position = route.back();
    }
    out.walked_m = haversine(start, s.position);
  }

  s.t += params.interval_s;
  s.arrived = s.next_index >= n ||
              (s.next_index + 1 == n && haversine(s.position, route.back()) <= params.arrival_tolerance_m);
  return out;
}

}  // namespace firescape
