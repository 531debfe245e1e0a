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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "firescape/geo.h"

namespace firescape::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kRuntimeAbort = 3,
  kNoRoute = 4,
  kInfeasible = 5,
};

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> sd_count;
  std::optional<std::size_t> cd_count;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> duration_s;
  std::optional<double> frame_interval_s;
  std::optional<std::string> route_timing;
  bool trajectories = false;
};

struct PlanRouteOptions {
  std::filesystem::path graph;
  std::filesystem::path fires;
  std::filesystem::path safes;
  std::filesystem::path out;
  GeoPoint origin;
  double alpha = 1.0;
  double beta = 1.0;
  std::optional<std::filesystem::path> elevation_grid;
  std::optional<std::array<double, 3>> elevation_plane;
  int samples_per_edge = 0;
  std::string gain_mode = "endpoint";
  bool prune_crossing_edges = false;
};

struct PartitionOptions {
  std::filesystem::path fires;
  std::filesystem::path out;
  std::size_t sd_count = 0;
  std::size_t cd_count = 0;
  std::uint64_t seed = 1;
  double max_spacing_m = 10.0;
  std::size_t candidate_count = 200;
  double flight_endurance_s = 1800.0;
  double speed_mps = 5.0;
};

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err);
int cmd_plan_route(const PlanRouteOptions& o, std::ostream& out, std::ostream& err);
int cmd_partition(const PartitionOptions& o, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& dump, std::ostream& out, std::ostream& err);

/// Parses argv (program name first) and dispatches to a command.
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace firescape::cli
