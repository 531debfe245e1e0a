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

// Seeded synthetic scenarios: a jittered fire polygon inside a square road
// grid with safe locations on the grid corners and a tilted-plane terrain.

#pragma once

#include <cstddef>
#include <cstdint>

#include "firescape/geo.h"
#include "firescape/scenario_io.h"

namespace firescape {

struct SyntheticOptions {
  GeoPoint center{38.5, -121.5};
  double fire_radius_m = 250.0;
  std::size_t fire_vertices = 10;
  std::size_t grid_side = 20;     // nodes per side
  double grid_spacing_m = 60.0;
  std::size_t safe_count = 4;     // corners first, then edge midpoints (max 8)
  double slope_lat = 4000.0;      // plane coefficients, meters per degree
  double slope_lon = 2000.0;
  std::uint64_t seed = 1;
};

/// Fleet and timing fields keep their Scenario defaults.
Scenario make_synthetic_scenario(const SyntheticOptions& options = {});

/// Point offset from `origin` by metric north/east displacements.
GeoPoint offset_m(const GeoPoint& origin, double north_m, double east_m);

}  // namespace firescape
