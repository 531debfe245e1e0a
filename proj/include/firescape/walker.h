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

// Guided-walk proxy for an evacuee following an escape route between two
// coordinator location queries.

#pragma once

#include <cstddef>
#include <span>

#include "firescape/geo.h"
#include "firescape/request.h"

namespace firescape {

inline constexpr double kWalkSpeedMps = 1.5;
inline constexpr double kWalkUpdateIntervalS = 10.0;

struct WalkParams {
  double speed_mps = kWalkSpeedMps;
  double interval_s = kWalkUpdateIntervalS;
  double arrival_tolerance_m = kArrivalToleranceM;
  /// Checkpoint loop exactly as first written: passing a waypoint neither
  /// moves the evacuee onto it nor spends walking budget, so the evacuee
  /// cuts across every waypoint within reach and covers more route than
  /// the speed allows. Kept for comparison only.
  bool literal_checkpoints = false;
};

struct WalkState {
  GeoPoint position;
  std::size_t next_index = 0;
  double t = 0.0;
  bool arrived = false;
};

struct WalkStep {
  WalkState state;
  double walked_m = 0.0;  // path length covered in this step
};

/// Advances one update interval. Waypoints within the remaining budget are
/// reached in turn (the budget shrinks by each leg); the residual budget is
/// then spent moving toward the next waypoint. Once arrived the state is
/// returned unchanged. Throws ContractViolation on an empty route or an
/// index past the route.
WalkStep step(const WalkState& ws, std::span<const GeoPoint> route, const WalkParams& params = {});

/// Point at haversine distance `distance_m` from `from` along the lat/lon
/// segment toward `to` (never farther than `distance_m`, never past `to`).
GeoPoint advance_toward(const GeoPoint& from, const GeoPoint& to, double distance_m);

}  // namespace firescape
