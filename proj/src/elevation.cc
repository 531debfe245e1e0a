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

#include "firescape/elevation.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "json_util.h"

namespace firescape {

ElevationProvider ElevationProvider::grid(Grid g) {
  if (!(g.cell_deg > 0.0) || !std::isfinite(g.cell_deg)) {
    throw LoadError(fmt::format("elevation grid: cell_deg must be positive, got {}", g.cell_deg));
  }
  if (g.rows.size() < 2 || g.rows[0].size() < 2) {
    throw LoadError("elevation grid: need at least 2x2 samples");
  }
  const std::size_t cols = g.rows[0].size();
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    if (g.rows[i].size() != cols) {
      throw LoadError(fmt::format("elevation grid: row {} has {} samples, expected {}", i, g.rows[i].size(), cols));
    }
    for (double h : g.rows[i]) {
      if (!std::isfinite(h)) throw LoadError(fmt::format("elevation grid: non-finite sample in row {}", i));
    }
  }
  return ElevationProvider(std::move(g));
}

ElevationProvider ElevationProvider::load_grid(const std::filesystem::path& path) {
  const std::string ctx = path.string();
  const detail::Json doc = detail::read_json_file(path);
  detail::reject_unknown_keys(doc, {"origin", "cell_deg", "rows"}, ctx);
  const auto& origin = doc.at("origin");
  if (!origin.is_array() || origin.size() != 2) throw ParseError(ctx + ": origin must be [lat, lon]");
  Grid g;
  g.origin = GeoPoint{origin[0].get<double>(), origin[1].get<double>()};
  g.cell_deg = detail::number_at(doc, "cell_deg", ctx);
  const auto& rows = doc.at("rows");
  if (!rows.is_array()) throw ParseError(ctx + ": rows must be an array of arrays");
  for (const auto& row : rows) {
    if (!row.is_array()) throw ParseError(ctx + ": rows must be an array of arrays");
    g.rows.push_back(row.get<std::vector<double>>());
  }
  return grid(std::move(g));
}

double ElevationProvider::at(const GeoPoint& p) const {
  struct Visitor {
    const GeoPoint& p;
    double operator()(const Constant& c) const { return c.value_m; }
    double operator()(const Plane& pl) const { return pl.a * p.lat + pl.b * p.lon + pl.c; }
    double operator()(const Grid& g) const {
      const double fi = (p.lat - g.origin.lat) / g.cell_deg;
      const double fj = (p.lon - g.origin.lon) / g.cell_deg;
      const double max_i = static_cast<double>(g.rows.size() - 1);
      const double max_j = static_cast<double>(g.rows[0].size() - 1);
      constexpr double kSlack = 1e-9;
      if (!(fi >= -kSlack && fi <= max_i + kSlack && fj >= -kSlack && fj <= max_j + kSlack)) {
        throw Error(fmt::format("no elevation coverage at ({}, {})", p.lat, p.lon));
      }
      const double ci = std::clamp(fi, 0.0, max_i);
      const double cj = std::clamp(fj, 0.0, max_j);
      const auto i0 = static_cast<std::size_t>(std::min(std::floor(ci), max_i - 1));
      const auto j0 = static_cast<std::size_t>(std::min(std::floor(cj), max_j - 1));
      const double ti = ci - static_cast<double>(i0);
      const double tj = cj - static_cast<double>(j0);
      const double h00 = g.rows[i0][j0];
      const double h01 = g.rows[i0][j0 + 1];
      const double h10 = g.rows[i0 + 1][j0];
      const double h11 = g.rows[i0 + 1][j0 + 1];
      return (1 - ti) * ((1 - tj) * h00 + tj * h01) + ti * ((1 - tj) * h10 + tj * h11);
    }
  };
  return std::visit(Visitor{p}, mode_);
}

std::string ElevationProvider::describe() const {
  struct Visitor {
    std::string operator()(const Constant& c) const { return fmt::format("constant {} m", c.value_m); }
    std::string operator()(const Plane& p) const { return fmt::format("plane {}*lat + {}*lon + {}", p.a, p.b, p.c); }
    std::string operator()(const Grid& g) const {
      return fmt::format("grid {}x{} @ {} deg", g.rows.size(), g.rows[0].size(), g.cell_deg);
    }
  };
  return std::visit(Visitor{}, mode_);
}

}  // namespace firescape
