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

// Discrete-event simulation of a full evacuation mission: service drones
// patrol and detect, coordinators run the request pipeline, evacuees walk
// their routes, and scripted faults exercise recovery.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "firescape/geo.h"
#include "firescape/ids.h"
#include "firescape/request.h"
#include "firescape/resilience.h"
#include "firescape/scenario_io.h"

namespace firescape {

enum class RequestOutcome {
  kInFlight,
  kActive,           // stored, walk unfinished when the run ended
  kProcessed,
  kDroppedDeadCd,    // detection sent to a coordinator that had crashed
  kLostInPipeline,   // receiving coordinator crashed before the insert
  kNoRoute,
  kRowsLost,         // every replica of the row failed
};

std::string_view to_string(RequestOutcome o);

/// Stage timestamps for one detection, all in virtual microseconds.
struct LatencyRecord {
  std::optional<RequestId> id;
  SdId sd;
  std::optional<CdId> receiver;
  SimTime t_detected = 0;
  SimTime t_detection = 0;   // pose estimate done on the SD
  SimTime t_pr_enqueue = 0;  // arrived at the coordinator
  SimTime t_route_start = 0;
  SimTime t_route_done = 0;
  SimTime t_ar_enqueue = 0;
  SimTime t_insert_start = 0;
  SimTime t_stored = 0;
  std::size_t expansions = 0;
  double route_length_m = 0.0;
  RequestOutcome outcome = RequestOutcome::kInFlight;
  std::optional<SimTime> t_processed;

  bool stored() const {
    return outcome == RequestOutcome::kActive || outcome == RequestOutcome::kProcessed ||
           outcome == RequestOutcome::kRowsLost;
  }
  SimTime detection_latency() const { return t_detection - t_detected; }
  SimTime transport() const { return t_pr_enqueue - t_detection; }
  SimTime pr_wait() const { return t_route_start - t_pr_enqueue; }
  SimTime route_gen() const { return t_route_done - t_route_start; }
  SimTime ar_wait() const { return t_insert_start - t_route_done; }
  SimTime insert() const { return t_stored - t_insert_start; }
  SimTime end_to_end() const { return t_stored - t_detected; }
};

struct LoadSample {
  double t = 0.0;
  CdId cd;
  double load_m = 0.0;
};

struct TimeSeriesPoint {
  double t_end = 0.0;
  std::size_t total_rows = 0;
  std::size_t updated_rows = 0;  // distinct rows written during the bin
};

struct FaultRecord {
  FaultSpec spec;
  std::string resolved_target;
  std::vector<RequestId> active_before;      // every ACTIVE row when it fired
  std::optional<double> detected_at;
  std::optional<double> orphans_cleared_at;  // no ACTIVE row still names the dead CD
};

struct RunResult {
  std::vector<LatencyRecord> requests;  // creation order
  std::vector<EvacuationRequest> final_rows;
  std::vector<RecoveryReport> recoveries;
  std::vector<FaultRecord> faults;
  std::vector<std::string> escalations;
  std::vector<LoadSample> load_history;
  std::vector<TimeSeriesPoint> timeseries;
  std::map<RequestId, std::vector<GeoPoint>> trajectories;  // when enabled
  std::vector<CdId> live_clients;  // live CDs that believe they are the client at the end
  double end_time_s = 0.0;
  double last_detection_s = 0.0;
  bool hit_time_limit = false;

  std::size_t created() const { return requests.size(); }
  std::size_t processed() const;
  std::size_t unserved() const { return created() - processed(); }
};

/// Runs the mission to completion (or max_sim_time). Deterministic for a
/// fixed scenario unless route timing is measured. Invariant breaches
/// propagate as exceptions; fleet-level losses end the run early and are
/// listed in `escalations`.
RunResult run(const Scenario& scenario);

/// Closest hover by haversine, lowest id on ties. Throws Unavailable when
/// no coordinator is live.
CdId nearest_coordinator(const GeoPoint& sd_position, const std::map<CdId, GeoPoint>& live_hovers);

/// Nearest-rank percentile of already sorted values (q in [0, 100]).
double percentile_sorted(const std::vector<double>& sorted, double q);

struct Metrics {
  std::string requests_csv;
  std::string timeseries_csv;
  std::string recovery_json;
  std::string summary;
  std::string store_jsonl;
  std::string trajectories_geojson;  // empty unless recorded
};

Metrics collect_metrics(const RunResult& result);

}  // namespace firescape
