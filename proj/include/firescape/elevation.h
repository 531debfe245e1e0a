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

#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "firescape/geo.h"

namespace firescape {

/// Source of terrain elevation in meters. Three deterministic modes:
/// a constant, an analytic plane h = a*lat + b*lon + c, and a regular
/// lat/lon grid sampled with bilinear interpolation.
class ElevationProvider {
 public:
  struct Constant {
    double value_m = 0.0;
  };
  struct Plane {
    double a = 0.0;  // meters per degree latitude
    double b = 0.0;  // meters per degree longitude
    double c = 0.0;
  };
  /// rows[i][j] is the elevation at (origin.lat + i*cell_deg,
  /// origin.lon + j*cell_deg).
  struct Grid {
    GeoPoint origin;
    double cell_deg = 0.0;
    std::vector<std::vector<double>> rows;
  };

  ElevationProvider() : mode_(Constant{}) {}

  static ElevationProvider constant(double value_m) { return ElevationProvider(Constant{value_m}); }
  static ElevationProvider plane(double a, double b, double c) { return ElevationProvider(Plane{a, b, c}); }
  /// Validates shape (rectangular, >= 2x2, positive cell, finite values).
  static ElevationProvider grid(Grid g);
  /// Reads {"origin":[lat,lon], "cell_deg":x, "rows":[[h...]...]}.
  static ElevationProvider load_grid(const std::filesystem::path& path);

  /// Throws Error if the point falls outside a grid's coverage.
  double at(const GeoPoint& p) const;

  std::string describe() const;

  using Mode = std::variant<Constant, Plane, Grid>;
  const Mode& mode() const { return mode_; }

 private:
  explicit ElevationProvider(Mode mode) : mode_(std::move(mode)) {}

  Mode mode_;
};

}  // namespace firescape
