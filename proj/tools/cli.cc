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

#include "cli.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "firescape/errors.h"
#include "firescape/ground_graph.h"
#include "firescape/perimeter.h"
#include "firescape/request.h"
#include "firescape/rng.h"
#include "firescape/router.h"
#include "firescape/scenario_io.h"
#include "firescape/sim.h"

namespace firescape::cli {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

// Maps library exceptions onto exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const LoadError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeAbort;
  }
}

const char* kPalette[] = {"#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
                          "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff", "#9a6324", "#800000"};

Json lonlat(const GeoPoint& p) { return Json::array({p.lon, p.lat}); }

}  // namespace

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Scenario sc = load_scenario(o.scenario);
    if (o.seed) sc.rng_seed = *o.seed;
    if (o.sd_count) sc.sd_count = *o.sd_count;
    if (o.cd_count) sc.cd_count = *o.cd_count;
    if (o.alpha) sc.weights.alpha = *o.alpha;
    if (o.beta) sc.weights.beta = *o.beta;
    if (o.duration_s) sc.surveillance_duration_s = *o.duration_s;
    if (o.frame_interval_s) sc.frame_interval_s = *o.frame_interval_s;
    if (o.route_timing) {
      sc.route_timing.mode = *o.route_timing == "measured" ? RouteTimingMode::kMeasured : RouteTimingMode::kModeled;
    }
    if (o.trajectories) sc.trajectories = true;
    sc.validate();

    RunResult result;
    try {
      result = run(sc);
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      err << "error: " << e.what() << '\n';
      return static_cast<int>(kRuntimeAbort);
    }
    const Metrics m = collect_metrics(result);
    fs::create_directories(o.out_dir);
    write_file_atomic(o.out_dir / "requests.csv", m.requests_csv);
    write_file_atomic(o.out_dir / "timeseries.csv", m.timeseries_csv);
    write_file_atomic(o.out_dir / "recovery.json", m.recovery_json);
    write_file_atomic(o.out_dir / "summary.txt", m.summary);
    write_file_atomic(o.out_dir / "store.jsonl", m.store_jsonl);
    if (!m.trajectories_geojson.empty()) write_file_atomic(o.out_dir / "trajectories.geojson", m.trajectories_geojson);
    out << m.summary;
    for (const std::string& e : result.escalations) err << "escalation: " << e << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_plan_route(const PlanRouteOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validate(o.origin);
    const CostWeights w{o.alpha, o.beta};
    w.validate();
    GainMode mode = GainMode::kEndpoint;
    if (o.gain_mode == "piecewise") {
      mode = GainMode::kPiecewise;
    } else if (o.gain_mode != "endpoint") {
      throw ParseError(fmt::format("--gain-mode must be endpoint or piecewise, got '{}'", o.gain_mode));
    }
    ElevationProvider provider;
    if (o.elevation_grid) {
      provider = ElevationProvider::load_grid(*o.elevation_grid);
    } else if (o.elevation_plane) {
      const auto& p = *o.elevation_plane;
      provider = ElevationProvider::plane(p[0], p[1], p[2]);
    }
    const std::vector<FirePolygon> fires = load_fire_polygons(o.fires);
    const std::vector<GeoPoint> safes = load_safe_locations(o.safes);
    if (safes.empty()) throw LoadError(fmt::format("{}: no safe locations", o.safes.string()));
    const GroundGraph raw = read_ground_graph(o.graph);
    const GroundGraph pruned = prune(raw, fires, PruneOptions{o.prune_crossing_edges});
    if (pruned.empty()) throw LoadError("every graph node lies inside the fire");
    const GroundGraph g = augment_elevation(pruned, provider, o.samples_per_edge, mode);

    const PlanResult plan = plan_escape_route(g, o.origin, safes, w);
    if (!plan.found()) {
      err << "no route found; notify base station. attempted safe locations:\n";
      for (const GeoPoint& p : plan.failure().attempted_goals) err << fmt::format("  {:.7f},{:.7f}\n", p.lat, p.lon);
      return static_cast<int>(kNoRoute);
    }
    const Route& r = plan.route();
    export_route(r, o.out);
    out << fmt::format("length_m {:.3f}\ncost {:.3f}\ngoal {:.7f},{:.7f}\ngoal_index {}\nnodes", r.length_m, r.cost,
                       r.goal.lat, r.goal.lon, r.goal_index);
    for (const std::string& id : r.node_ids) out << ' ' << id;
    out << fmt::format("\nexpansions {}\n", plan.stats.expansions);
    return static_cast<int>(kOk);
  });
}

int cmd_partition(const PartitionOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.sd_count == 0 || o.cd_count == 0) throw ContractViolation("--sd-count and --cd-count must be >= 1");
    const EnergyModel energy{o.flight_endurance_s, o.speed_mps};
    energy.validate();
    const std::vector<FirePolygon> fires = load_fire_polygons(o.fires);
    if (fires.empty()) throw LoadError(fmt::format("{}: no fire polygons", o.fires.string()));
    const std::vector<GeoPoint> waypoints = densify_perimeter(fires, o.max_spacing_m).pooled();
    if (o.sd_count > waypoints.size()) {
      throw ContractViolation(
          fmt::format("{} service drones requested but the perimeter has only {} waypoints", o.sd_count,
                      waypoints.size()));
    }
    if (o.cd_count > o.candidate_count) {
      throw ContractViolation(fmt::format("--cd-count {} exceeds --candidates {}", o.cd_count, o.candidate_count));
    }
    const SdAssignment assignment = assign_waypoints(waypoints, o.sd_count, o.seed);
    const std::vector<GeoPoint> candidates = sample_candidates(fires, o.candidate_count, derive_seed(o.seed, 5));
    const std::vector<GeoPoint> hovers = place_coordinators(candidates, o.cd_count, derive_seed(o.seed, 4));
    const FeasibilityReport report = check_feasibility(assignment, energy);

    Json features = Json::array();
    for (std::size_t k = 0; k < assignment.clusters.size(); ++k) {
      const Cluster& c = assignment.clusters[k];
      const DroneFeasibility& f = report.drones[k];
      Json coords = Json::array();
      for (const GeoPoint& p : c.waypoints) coords.push_back(lonlat(p));
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "MultiPoint"}, {"coordinates", std::move(coords)}}},
                          {"properties",
                           {{"sd", c.sd.str()},
                            {"color", kPalette[k % std::size(kPalette)]},
                            {"centroid", lonlat(c.centroid)},
                            {"waypoints", c.waypoints.size()},
                            {"tour_m", f.tour_m},
                            {"duration_s", f.duration_s},
                            {"feasible", f.feasible}}}});
    }
    for (std::size_t i = 0; i < hovers.size(); ++i) {
      features.push_back({{"type", "Feature"},
                          {"geometry", {{"type", "Point"}, {"coordinates", lonlat(hovers[i])}}},
                          {"properties", {{"cd", CdId{static_cast<int>(i)}.str()}, {"role", "hover"}}}});
    }
    write_file_atomic(o.out, Json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) + "\n");

    out << fmt::format("waypoints {}\nclusters {}\nhovers {}\n", waypoints.size(), assignment.clusters.size(),
                       hovers.size());
    for (const DroneFeasibility& f : report.drones) {
      out << fmt::format("{} tour_m {:.1f} duration_s {:.1f} {}\n", f.sd.str(), f.tour_m, f.duration_s,
                         f.feasible ? "feasible" : "INFEASIBLE");
    }
    if (!report.all_feasible) {
      err << "error: tours exceed flight endurance; additional service drones needed\n";
      return static_cast<int>(kInfeasible);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_report(const fs::path& dump, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::ifstream in(dump);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", dump.string()));
    std::map<RequestStatus, std::size_t> tally{
        {RequestStatus::kPending, 0}, {RequestStatus::kActive, 0}, {RequestStatus::kProcessed, 0}};
    std::map<std::string, double> loads;
    std::vector<double> latency_ms;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      EvacuationRequest r;
      try {
        r = parse_json_line(line);
      } catch (const Error& e) {
        throw ParseError(fmt::format("{}:{}: {}", dump.string(), line_no, e.what()));
      }
      ++tally[r.status];
      loads.try_emplace(r.processed_by.str(), 0.0);
      if (r.status == RequestStatus::kActive) loads[r.processed_by.str()] += r.route_length_m;
      if (r.t_stored) latency_ms.push_back((*r.t_stored - r.t_detected) * 1000.0);
    }
    std::sort(latency_ms.begin(), latency_ms.end());
    const std::size_t total = tally[RequestStatus::kPending] + tally[RequestStatus::kActive] +
                              tally[RequestStatus::kProcessed];
    out << fmt::format("total {}\nPENDING {}\nACTIVE {}\nPROCESSED {}\n", total, tally[RequestStatus::kPending],
                       tally[RequestStatus::kActive], tally[RequestStatus::kProcessed]);
    for (double q : {50.0, 95.0, 99.0, 100.0}) {
      const double v = latency_ms.empty() ? 0.0 : percentile_sorted(latency_ms, q);
      out << fmt::format("latency_p{}_ms {:.3f}\n", static_cast<int>(q), v);
    }
    for (const auto& [cd, load] : loads) out << fmt::format("load {} {:.3f}\n", cd, load);
    return static_cast<int>(kOk);
  });
}

namespace {

GeoPoint parse_latlon(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw ParseError(fmt::format("expected LAT,LON, got '{}'", text));
  try {
    std::size_t used = 0;
    const std::string lat_s = text.substr(0, comma);
    const std::string lon_s = text.substr(comma + 1);
    const double lat = std::stod(lat_s, &used);
    if (used != lat_s.size()) throw std::invalid_argument("lat");
    const double lon = std::stod(lon_s, &used);
    if (used != lon_s.size()) throw std::invalid_argument("lon");
    return {lat, lon};
  } catch (const std::logic_error&) {
    throw ParseError(fmt::format("expected LAT,LON, got '{}'", text));
  }
}

}  // namespace

int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"firescape: drone-assisted wildfire evacuation planner and simulator"};
  app.require_subcommand(1);

  RunOptions run_o;
  std::optional<std::string> timing;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write metrics");
  run_cmd->add_option("scenario", run_o.scenario, "scenario JSON")->required();
  run_cmd->add_option("-o,--out", run_o.out_dir, "output directory")->required();
  run_cmd->add_option("--seed", run_o.seed, "override rng_seed");
  run_cmd->add_option("--sd-count", run_o.sd_count, "override fleet.sd_count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--cd-count", run_o.cd_count, "override fleet.cd_count")->check(CLI::PositiveNumber);
  run_cmd->add_option("--alpha", run_o.alpha, "override weights.alpha")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--beta", run_o.beta, "override weights.beta")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--duration", run_o.duration_s, "override timing.surveillance_duration_s")
      ->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--frame-interval", run_o.frame_interval_s, "override timing.frame_interval_s")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--route-timing", timing, "modeled or measured")
      ->check(CLI::IsMember({"modeled", "measured"}));
  run_cmd->add_flag("--trajectories", run_o.trajectories, "also write trajectories.geojson");

  PlanRouteOptions plan_o;
  std::string origin_text;
  std::vector<double> plane;
  auto* plan_cmd = app.add_subcommand("plan-route", "prune, add elevation and plan one escape route");
  plan_cmd->add_option("--graph", plan_o.graph, "ground graph JSON")->required();
  plan_cmd->add_option("--fires", plan_o.fires, "fire polygons GeoJSON")->required();
  plan_cmd->add_option("--safes", plan_o.safes, "safe locations GeoJSON")->required();
  plan_cmd->add_option("--origin", origin_text, "evacuee position LAT,LON")->required();
  plan_cmd->add_option("-o,--out", plan_o.out, "route GeoJSON output")->required();
  plan_cmd->add_option("--alpha", plan_o.alpha, "distance weight")->check(CLI::NonNegativeNumber);
  plan_cmd->add_option("--beta", plan_o.beta, "elevation-gain weight")->check(CLI::NonNegativeNumber);
  auto* grid_opt = plan_cmd->add_option("--elevation-grid", plan_o.elevation_grid, "elevation grid JSON");
  plan_cmd->add_option("--elevation-plane", plane, "plane coefficients A B C (h = A*lat + B*lon + C)")
      ->expected(3)
      ->excludes(grid_opt);
  plan_cmd->add_option("--samples", plan_o.samples_per_edge, "interior elevation samples per edge")
      ->check(CLI::NonNegativeNumber);
  plan_cmd->add_option("--gain-mode", plan_o.gain_mode, "endpoint or piecewise")
      ->check(CLI::IsMember({"endpoint", "piecewise"}));
  plan_cmd->add_flag("--prune-crossing", plan_o.prune_crossing_edges, "also drop edges that cross a fire ring");

  PartitionOptions part_o;
  auto* part_cmd = app.add_subcommand("partition", "cluster perimeter waypoints and place coordinators");
  part_cmd->add_option("--fires", part_o.fires, "fire polygons GeoJSON")->required();
  part_cmd->add_option("--sd-count", part_o.sd_count, "service drones")->required()->check(CLI::PositiveNumber);
  part_cmd->add_option("--cd-count", part_o.cd_count, "coordinator drones")->required()->check(CLI::PositiveNumber);
  part_cmd->add_option("--seed", part_o.seed, "rng seed");
  part_cmd->add_option("-o,--out", part_o.out, "partition GeoJSON output")->required();
  part_cmd->add_option("--spacing", part_o.max_spacing_m, "max waypoint spacing in meters")
      ->check(CLI::PositiveNumber);
  part_cmd->add_option("--candidates", part_o.candidate_count, "hover candidates to sample")
      ->check(CLI::PositiveNumber);
  part_cmd->add_option("--endurance", part_o.flight_endurance_s, "flight endurance in seconds")
      ->check(CLI::PositiveNumber);
  part_cmd->add_option("--speed", part_o.speed_mps, "cruise speed in m/s")->check(CLI::PositiveNumber);

  fs::path dump;
  auto* report_cmd = app.add_subcommand("report", "summarize a store dump");
  report_cmd->add_option("dump", dump, "store.jsonl from a run")->required();

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  if (run_cmd->parsed()) {
    run_o.route_timing = timing;
    return cmd_run(run_o, out, err);
  }
  if (plan_cmd->parsed()) {
    try {
      plan_o.origin = parse_latlon(origin_text);
    } catch (const ParseError& e) {
      err << "error: --origin: " << e.what() << '\n';
      return kInvalidInput;
    }
    if (!plane.empty()) plan_o.elevation_plane = std::array<double, 3>{plane[0], plane[1], plane[2]};
    return cmd_plan_route(plan_o, out, err);
  }
  if (part_cmd->parsed()) return cmd_partition(part_o, out, err);
  return cmd_report(dump, out, err);
}

}  // namespace firescape::cli
