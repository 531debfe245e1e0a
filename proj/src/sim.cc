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

#include "firescape/sim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "firescape/errors.h"
#include "firescape/event_queue.h"
#include "firescape/ground_graph.h"
#include "firescape/log.h"
#include "firescape/perimeter.h"
#include "firescape/replicated_store.h"
#include "firescape/rng.h"
#include "firescape/router.h"
#include "firescape/walker.h"

namespace firescape {

std::string_view to_string(RequestOutcome o) {
  switch (o) {
    case RequestOutcome::kInFlight:
      return "in_flight";
    case RequestOutcome::kActive:
      return "active";
    case RequestOutcome::kProcessed:
      return "processed";
    case RequestOutcome::kDroppedDeadCd:
      return "dropped_dead_cd";
    case RequestOutcome::kLostInPipeline:
      return "lost_in_pipeline";
    case RequestOutcome::kNoRoute:
      return "no_route";
    case RequestOutcome::kRowsLost:
      return "rows_lost";
  }
  return "unknown";
}

std::size_t RunResult::processed() const {
  return static_cast<std::size_t>(std::count_if(requests.begin(), requests.end(), [](const LatencyRecord& r) {
    return r.outcome == RequestOutcome::kProcessed;
  }));
}

CdId nearest_coordinator(const GeoPoint& sd_position, const std::map<CdId, GeoPoint>& live_hovers) {
  if (live_hovers.empty()) throw Unavailable("no live coordinator to receive the detection");
  CdId best = live_hovers.begin()->first;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [cd, hover] : live_hovers) {
    const double d = haversine(sd_position, hover);
    if (d < best_d) {
      best_d = d;
      best = cd;
    }
  }
  return best;
}

double percentile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw ContractViolation("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 100.0)) throw ContractViolation(fmt::format("percentile {} outside [0, 100]", q));
  const auto n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::max(1.0, std::ceil(q / 100.0 * n)));
  return sorted[std::min(rank, sorted.size()) - 1];
}

namespace {

enum class Kind {
  kSdFrame,
  kDetection,
  kPrEnqueue,
  kRouteGenDone,
  kArEnqueue,
  kStoreInsertDone,
  kWalkStep,
  kHeartbeatCd,
  kHeartbeatSd,
  kFault,
  kRecoveryPhase,
};

struct Ev {
  Kind kind;
  int drone = -1;
  std::size_t item = 0;
  std::uint64_t gen = 0;
};

// Stream ids for derive_seed.
enum Stream : std::uint64_t {
  kStreamFrames = 1,
  kStreamRequestIds,
  kStreamPartition,
  kStreamPlacement,
  kStreamCandidates,
  kStreamRecovery,
  kStreamRepartition,
  kStreamClient,
};

constexpr double kDetectionJitterDeg = 5e-5;

struct SdPath {
  std::vector<GeoPoint> pts;
  std::vector<double> cum;
  std::size_t loop_start = 0;
  SimTime t0 = 0;
};

SdPath make_path(std::vector<GeoPoint> pts, std::size_t loop_start, SimTime t0) {
  SdPath p{std::move(pts), {}, loop_start, t0};
  p.cum.assign(p.pts.size(), 0.0);
  for (std::size_t i = 1; i < p.pts.size(); ++i) p.cum[i] = p.cum[i - 1] + haversine(p.pts[i - 1], p.pts[i]);
  return p;
}

GeoPoint locate(const SdPath& p, double s) {
  auto it = std::upper_bound(p.cum.begin(), p.cum.end(), s);
  const auto idx = static_cast<std::size_t>(it - p.cum.begin());
  if (idx == 0) return p.pts.front();
  if (idx >= p.pts.size()) return p.pts.back();
  const double len = p.cum[idx] - p.cum[idx - 1];
  const double frac = len > 0.0 ? std::clamp((s - p.cum[idx - 1]) / len, 0.0, 1.0) : 0.0;
  return interpolate(p.pts[idx - 1], p.pts[idx], frac);
}

// Runs the lead-in once, then ping-pongs over the loop part.
GeoPoint position_at(const SdPath& p, double speed, SimTime t) {
  const double s = std::max(0.0, to_seconds(t - p.t0)) * speed;
  const double lead = p.cum[p.loop_start];
  if (s <= lead) return locate(p, s);
  const double loop = p.cum.back() - lead;
  if (loop <= 0.0) return p.pts[p.loop_start];
  double m = std::fmod(s - lead, 2.0 * loop);
  if (m > loop) m = 2.0 * loop - m;
  return locate(p, lead + m);
}

struct SdState {
  SdId id;
  bool alive = true;
  SdPath path;
  Rng rng{0};
};

struct CdState {
  CdId id;
  bool alive = true;
  RequestQueue pr;
  RequestQueue ar;
  bool planner_busy = false;
  bool inserter_busy = false;
};

struct RecoveryJob {
  CdRecovery recovery;
  bool needs_restart = false;
};

std::string seconds_text(SimTime t) {
  const char* sign = t < 0 ? "-" : "";
  const SimTime a = t < 0 ? -t : t;
  return fmt::format("{}{}.{:06}", sign, a / kMicrosPerSecond, a % kMicrosPerSecond);
}

class Simulation {
 public:
  explicit Simulation(const Scenario& sc);
  RunResult run();

 private:
  void dispatch(SimTime now, const Ev& ev);
  void on_frame(SimTime now, const Ev& ev);
  void on_detection(SimTime now, std::size_t i);
  void on_pr_enqueue(SimTime now, int cd, std::size_t i);
  void on_route_done(SimTime now, int cd, std::size_t i);
  void on_ar_enqueue(SimTime now, int cd, std::size_t i);
  void on_insert_done(SimTime now, int cd, std::size_t i);
  void on_walk(SimTime now, std::size_t i);
  void on_heartbeat_cd(SimTime now);
  void on_heartbeat_sd(SimTime now);
  void on_fault(SimTime now, std::size_t f);
  void on_recovery_phase(SimTime now, std::uint64_t gen);

  void try_route(SimTime now, CdState& cd);
  void try_insert(SimTime now, CdState& cd);
  void lose(std::size_t i, RequestOutcome why);
  void detect_failure(SimTime now, CdId cd);
  void start_next_recovery(SimTime now);
  void check_orphans(SimTime now);
  void escalate(SimTime now, std::string msg);
  std::map<CdId, double> current_loads() const;
  bool finished(SimTime now) const;
  bool cd_alive(CdId cd) const { return cd.value >= 0 && static_cast<std::size_t>(cd.value) < cds_.size() && cds_[cd.value].alive; }

  void schedule(SimTime t, Ev ev) { events_.push(t, ev); }

  const Scenario& sc_;
  GroundGraph graph_;
  std::vector<GeoPoint> waypoints_;
  std::vector<SdState> sds_;
  std::vector<CdState> cds_;
  CoordinationState coord_;
  std::optional<ReplicatedStore> store_;
  MissTracker<SdId> sd_misses_;
  RequestIdGenerator ids_;
  EventQueue<Ev> events_;
  WalkParams walk_;

  SimTime frame_interval_;
  SimTime surveillance_end_;
  SimTime detection_latency_;
  SimTime message_delay_;
  SimTime walk_interval_;
  SimTime heartbeat_interval_;

  std::vector<Detection> detections_;
  std::unordered_map<RequestId, std::size_t> index_;
  std::unordered_map<std::size_t, EvacuationRequest> in_planner_;
  std::unordered_map<std::size_t, PlanResult> plans_;
  std::set<std::size_t> active_;
  std::size_t in_flight_ = 0;
  std::vector<std::pair<SimTime, std::size_t>> updates_;

  std::deque<RecoveryJob> jobs_;
  bool job_running_ = false;
  std::uint64_t job_gen_ = 0;
  std::uint64_t recoveries_started_ = 0;
  std::uint64_t repartitions_ = 0;
  bool terminated_ = false;

  RunResult result_;
};

Simulation::Simulation(const Scenario& sc)
    : sc_(sc),
      sd_misses_(sc.miss_threshold),
      ids_(derive_seed(sc.rng_seed, kStreamRequestIds)),
      frame_interval_(from_seconds(sc.frame_interval_s)),
      surveillance_end_(from_seconds(sc.surveillance_duration_s)),
      detection_latency_(from_seconds(sc.detection_latency_s)),
      message_delay_(from_seconds(sc.message_delay_s)),
      walk_interval_(from_seconds(sc.walk_update_interval_s)),
      heartbeat_interval_(from_seconds(sc.heartbeat_interval_s)) {
  sc.validate();
  if (frame_interval_ <= 0 || walk_interval_ <= 0 || heartbeat_interval_ <= 0) {
    throw LoadError("scenario intervals must be at least one microsecond");
  }
  graph_ = prune(sc.graph, sc.fire_polygons, PruneOptions{sc.prune_crossing_edges});
  if (graph_.empty()) throw LoadError("ground graph has no node outside the fire");
  waypoints_ = densify_perimeter(sc.fire_polygons, sc.max_spacing_m).pooled();
  if (sc.sd_count > waypoints_.size()) {
    throw LoadError(fmt::format("scenario.fleet.sd_count {} exceeds the {} perimeter waypoints", sc.sd_count,
                                waypoints_.size()));
  }
  walk_ = WalkParams{sc.walk_speed_mps, sc.walk_update_interval_s, sc.arrival_tolerance_m, sc.literal_walk};

  std::vector<SdId> sd_ids;
  for (std::size_t i = 0; i < sc.sd_count; ++i) sd_ids.push_back(SdId{static_cast<int>(i)});
  const SdAssignment assignment = assign_waypoints(waypoints_, sd_ids, derive_seed(sc.rng_seed, kStreamPartition));
  const std::optional<GeoPoint> base = sc.include_transit_leg ? sc.base_station : std::nullopt;
  const FeasibilityReport feasibility = check_feasibility(assignment, sc.energy, base);
  if (!feasibility.all_feasible) {
    result_.escalations.push_back("perimeter tours exceed drone endurance; additional service drones needed");
  }
  for (const Cluster& c : assignment.clusters) {
    SdState s;
    s.id = c.sd;
    s.rng = Rng(derive_seed(sc.rng_seed, kStreamFrames, static_cast<std::uint64_t>(c.sd.value)));
    std::vector<GeoPoint> pts;
    std::size_t loop_start = 0;
    if (base) {
      pts.push_back(*base);
      loop_start = 1;
    }
    if (c.waypoints.empty()) {
      pts.push_back(c.centroid);
    } else {
      pts.insert(pts.end(), c.waypoints.begin(), c.waypoints.end());
    }
    s.path = make_path(std::move(pts), loop_start, 0);
    sds_.push_back(std::move(s));
  }

  std::vector<CdId> cd_ids;
  for (std::size_t i = 0; i < sc.cd_count; ++i) {
    cd_ids.push_back(CdId{static_cast<int>(i)});
    CdState c;
    c.id = cd_ids.back();
    cds_.push_back(std::move(c));
  }
  coord_.candidates =
      sample_candidates(sc.fire_polygons, sc.candidate_count, derive_seed(sc.rng_seed, kStreamCandidates));
  const std::vector<GeoPoint> hovers =
      place_coordinators(coord_.candidates, sc.cd_count, derive_seed(sc.rng_seed, kStreamPlacement));
  for (std::size_t i = 0; i < cd_ids.size(); ++i) {
    coord_.hovers.emplace(cd_ids[i], hovers[i]);
    coord_.loads.loads.emplace(cd_ids[i], 0.0);
  }
  coord_.heartbeat.interval_s = sc.heartbeat_interval_s;
  coord_.heartbeat.server_misses = MissTracker<CdId>(sc.miss_threshold);
  coord_.heartbeat.client = elect_client(cd_ids, derive_seed(sc.rng_seed, kStreamClient));
  coord_.sd_owner = assign_sd_owners(assignment, coord_.hovers);
  store_.emplace(cd_ids, sc.replication_factor);

  if (surveillance_end_ > 0) {
    for (const SdState& s : sds_) schedule(0, Ev{Kind::kSdFrame, s.id.value, 0});
  }
  schedule(heartbeat_interval_, Ev{Kind::kHeartbeatCd});
  schedule(heartbeat_interval_, Ev{Kind::kHeartbeatSd});
  for (std::size_t f = 0; f < sc.faults.size(); ++f) {
    schedule(from_seconds(sc.faults[f].t), Ev{Kind::kFault, -1, f});
    FaultRecord rec;
    rec.spec = sc.faults[f];
    result_.faults.push_back(rec);
  }
}

RunResult Simulation::run() {
  const SimTime limit = from_seconds(sc_.max_sim_time_s);
  SimTime now = 0;
  while (!events_.empty() && !terminated_) {
    if (events_.next_time() > limit) {
      result_.hit_time_limit = true;
      now = limit;
      break;
    }
    auto item = events_.pop();
    now = item.t;
    try {
      dispatch(now, item.payload);
    } catch (const Escalation& e) {
      escalate(now, e.what());
    } catch (const Error& e) {
      throw Error(fmt::format("simulation aborted at t={}s: {}", seconds_text(now), e.what()));
    }
    if (finished(now)) break;
  }
  result_.end_time_s = to_seconds(now);

  try {
    result_.final_rows = store_->query(store_query::All{});
  } catch (const Unavailable&) {
    for (const auto& r : result_.requests) {
      if (!r.id || !store_->contains(*r.id)) continue;
      try {
        result_.final_rows.push_back(store_->get(*r.id));
      } catch (const Unavailable&) {
      }
    }
  }
  if (cd_alive(coord_.heartbeat.client)) result_.live_clients.push_back(coord_.heartbeat.client);

  // Time series in bins of one walk interval, plus one trailing bin.
  const SimTime end = from_seconds(result_.end_time_s);
  const SimTime bins = end / walk_interval_ + 2;
  std::vector<SimTime> stored_at;
  for (const auto& r : result_.requests) {
    if (r.stored()) stored_at.push_back(r.t_stored);
  }
  std::sort(stored_at.begin(), stored_at.end());
  std::size_t u = 0;
  for (SimTime b = 0; b < bins; ++b) {
    const SimTime lo = b * walk_interval_;
    const SimTime hi = lo + walk_interval_;
    TimeSeriesPoint pt;
    pt.t_end = to_seconds(hi);
    pt.total_rows = static_cast<std::size_t>(std::upper_bound(stored_at.begin(), stored_at.end(), hi) - stored_at.begin());
    std::set<std::size_t> touched;
    while (u < updates_.size() && updates_[u].first <= hi) {
      if (updates_[u].first > lo || b == 0) touched.insert(updates_[u].second);
      ++u;
    }
    pt.updated_rows = touched.size();
    result_.timeseries.push_back(pt);
  }
  return std::move(result_);
}

bool Simulation::finished(SimTime now) const {
  return now >= surveillance_end_ && in_flight_ == 0 && active_.empty() && jobs_.empty();
}

void Simulation::dispatch(SimTime now, const Ev& ev) {
  switch (ev.kind) {
    case Kind::kSdFrame:
      on_frame(now, ev);
      break;
    case Kind::kDetection:
      on_detection(now, ev.item);
      break;
    case Kind::kPrEnqueue:
      on_pr_enqueue(now, ev.drone, ev.item);
      break;
    case Kind::kRouteGenDone:
      on_route_done(now, ev.drone, ev.item);
      break;
    case Kind::kArEnqueue:
      on_ar_enqueue(now, ev.drone, ev.item);
      break;
    case Kind::kStoreInsertDone:
      on_insert_done(now, ev.drone, ev.item);
      break;
    case Kind::kWalkStep:
      on_walk(now, ev.item);
      break;
    case Kind::kHeartbeatCd:
      on_heartbeat_cd(now);
      break;
    case Kind::kHeartbeatSd:
      on_heartbeat_sd(now);
      break;
    case Kind::kFault:
      on_fault(now, ev.item);
      break;
    case Kind::kRecoveryPhase:
      on_recovery_phase(now, ev.gen);
      break;
  }
}

void Simulation::on_frame(SimTime now, const Ev& ev) {
  SdState& sd = sds_[static_cast<std::size_t>(ev.drone)];
  if (!sd.alive || now >= surveillance_end_) return;
  const double frac = to_seconds(now) / sc_.surveillance_duration_s;
  const double p = sc_.p_start + (sc_.p_end - sc_.p_start) * frac;
  if (sd.rng.bernoulli(p)) {
    const GeoPoint at = position_at(sd.path, sc_.sd_speed_mps, now);
    GeoPoint loc{at.lat + sd.rng.uniform(-kDetectionJitterDeg, kDetectionJitterDeg),
                 at.lon + sd.rng.uniform(-kDetectionJitterDeg, kDetectionJitterDeg)};
    loc.lat = std::clamp(loc.lat, -90.0, 90.0);
    LatencyRecord rec;
    rec.sd = sd.id;
    rec.t_detected = now;
    result_.requests.push_back(rec);
    detections_.push_back(Detection{sd.id, to_seconds(now), loc});
    ++in_flight_;
    result_.last_detection_s = to_seconds(now);
    schedule(now + detection_latency_, Ev{Kind::kDetection, sd.id.value, result_.requests.size() - 1});
  }
  const std::size_t next = ev.item + 1;
  const SimTime t_next = from_seconds(static_cast<double>(next) * sc_.frame_interval_s);
  if (t_next < surveillance_end_) schedule(t_next, Ev{Kind::kSdFrame, ev.drone, next});
}

void Simulation::lose(std::size_t i, RequestOutcome why) {
  result_.requests[i].outcome = why;
  --in_flight_;
  in_planner_.erase(i);
  plans_.erase(i);
}

void Simulation::on_detection(SimTime now, std::size_t i) {
  LatencyRecord& rec = result_.requests[i];
  rec.t_detection = now;
  const SdState& sd = sds_[static_cast<std::size_t>(rec.sd.value)];
  if (coord_.hovers.empty()) {
    lose(i, RequestOutcome::kDroppedDeadCd);
    return;
  }
  const CdId target = nearest_coordinator(position_at(sd.path, sc_.sd_speed_mps, rec.t_detected), coord_.hovers);
  rec.receiver = target;
  schedule(now + message_delay_, Ev{Kind::kPrEnqueue, target.value, i});
}

void Simulation::on_pr_enqueue(SimTime now, int cd_index, std::size_t i) {
  LatencyRecord& rec = result_.requests[i];
  rec.t_pr_enqueue = now;
  CdState& cd = cds_[static_cast<std::size_t>(cd_index)];
  if (!cd.alive) {
    lose(i, RequestOutcome::kDroppedDeadCd);
    return;
  }
  EvacuationRequest req = create_request(detections_[i], cd.id, sc_.safe_locations, ids_);
  rec.id = req.id;
  index_.emplace(req.id, i);
  cd.pr.push(std::move(req), now);
  try_route(now, cd);
}

void Simulation::try_route(SimTime now, CdState& cd) {
  if (cd.planner_busy || cd.pr.empty()) return;
  RequestQueue::Entry entry = cd.pr.pop();
  const std::size_t i = index_.at(entry.request.id);
  LatencyRecord& rec = result_.requests[i];
  rec.t_route_start = now;

  SimTime duration = 0;
  const auto wall_start = std::chrono::steady_clock::now();
  PlanResult plan = plan_escape_route(graph_, entry.request.detected_at, sc_.safe_locations, sc_.weights);
  if (sc_.route_timing.mode == RouteTimingMode::kMeasured) {
    const auto elapsed = std::chrono::steady_clock::now() - wall_start;
    duration = std::chrono::duration_cast<std::chrono::microseconds>(elapsed).count();
  } else {
    duration = from_seconds(sc_.route_timing.base_s +
                            static_cast<double>(plan.stats.expansions) * sc_.route_timing.per_expansion_s);
  }
  rec.expansions = plan.stats.expansions;
  in_planner_.insert_or_assign(i, std::move(entry.request));
  plans_.insert_or_assign(i, std::move(plan));
  cd.planner_busy = true;
  schedule(now + duration, Ev{Kind::kRouteGenDone, cd.id.value, i});
}

void Simulation::on_route_done(SimTime now, int cd_index, std::size_t i) {
  LatencyRecord& rec = result_.requests[i];
  rec.t_route_done = now;
  CdState& cd = cds_[static_cast<std::size_t>(cd_index)];
  if (!cd.alive) {
    lose(i, RequestOutcome::kLostInPipeline);
    return;
  }
  cd.planner_busy = false;
  EvacuationRequest req = std::move(in_planner_.at(i));
  const PlanResult plan = std::move(plans_.at(i));
  in_planner_.erase(i);
  plans_.erase(i);
  if (!plan.found()) {
    const auto& tried = plan.failure().attempted_goals;
    result_.escalations.push_back(fmt::format("no route for request {} (tried {} safe locations)", req.id.str(),
                                              tried.size()));
    lose(i, RequestOutcome::kNoRoute);
  } else {
    activate(req, plan.route(), to_seconds(now));
    rec.route_length_m = req.route_length_m;
    in_planner_.emplace(i, std::move(req));
    schedule(now, Ev{Kind::kArEnqueue, cd.id.value, i});
  }
  try_route(now, cd);
}

void Simulation::on_ar_enqueue(SimTime now, int cd_index, std::size_t i) {
  LatencyRecord& rec = result_.requests[i];
  rec.t_ar_enqueue = now;
  CdState& cd = cds_[static_cast<std::size_t>(cd_index)];
  if (!cd.alive) {
    lose(i, RequestOutcome::kLostInPipeline);
    return;
  }
  EvacuationRequest req = std::move(in_planner_.at(i));
  in_planner_.erase(i);
  cd.ar.push(std::move(req), now);
  try_insert(now, cd);
}

void Simulation::try_insert(SimTime now, CdState& cd) {
  if (cd.inserter_busy || cd.ar.empty()) return;
  RequestQueue::Entry entry = cd.ar.pop();
  const std::size_t i = index_.at(entry.request.id);
  result_.requests[i].t_insert_start = now;
  const std::size_t copies = std::min(sc_.replication_factor, store_->live_members().size());
  const SimTime latency = copies > 1 ? 2 * message_delay_ : 0;
  in_planner_.insert_or_assign(i, std::move(entry.request));
  cd.inserter_busy = true;
  schedule(now + latency, Ev{Kind::kStoreInsertDone, cd.id.value, i});
}

void Simulation::on_insert_done(SimTime now, int cd_index, std::size_t i) {
  CdState& cd = cds_[static_cast<std::size_t>(cd_index)];
  if (!cd.alive) {
    lose(i, RequestOutcome::kLostInPipeline);
    return;
  }
  LatencyRecord& rec = result_.requests[i];
  EvacuationRequest req = std::move(in_planner_.at(i));
  in_planner_.erase(i);
  if (sc_.trajectories) result_.trajectories[req.id].push_back(req.last_position);
  store_->insert(cd.id, std::move(req), to_seconds(now));
  rec.t_stored = now;
  rec.outcome = RequestOutcome::kActive;
  --in_flight_;
  active_.insert(i);
  schedule(now + walk_interval_, Ev{Kind::kWalkStep, -1, i});
  cd.inserter_busy = false;
  try_insert(now, cd);
}

void Simulation::on_walk(SimTime now, std::size_t i) {
  LatencyRecord& rec = result_.requests[i];
  if (rec.outcome != RequestOutcome::kActive) return;
  EvacuationRequest row;
  try {
    row = store_->get(*rec.id);
  } catch (const Unavailable&) {
    rec.outcome = RequestOutcome::kRowsLost;
    active_.erase(i);
    return;
  }
  if (!cd_alive(row.processed_by)) {
    schedule(now + walk_interval_, Ev{Kind::kWalkStep, -1, i});
    return;
  }
  const WalkState ws{row.last_position, row.next_waypoint, row.t_last_update, false};
  const WalkStep s = step(ws, row.escape_route, walk_);
  store_->update_location(row.id, s.state.position, to_seconds(now), s.state.next_index);
  updates_.emplace_back(now, i);
  if (sc_.trajectories) result_.trajectories[row.id].push_back(s.state.position);
  if (s.state.arrived) {
    store_->mark_processed(row.id, to_seconds(now), sc_.arrival_tolerance_m);
    rec.outcome = RequestOutcome::kProcessed;
    rec.t_processed = now;
    active_.erase(i);
  } else {
    schedule(now + walk_interval_, Ev{Kind::kWalkStep, -1, i});
  }
}

std::map<CdId, double> Simulation::current_loads() const {
  std::map<CdId, double> loads;
  for (std::size_t i : active_) {
    try {
      const EvacuationRequest row = store_->get(*result_.requests[i].id);
      loads[row.processed_by] += row.route_length_m;
    } catch (const Unavailable&) {
    }
  }
  return loads;
}

void Simulation::on_heartbeat_cd(SimTime now) {
  schedule(now + heartbeat_interval_, Ev{Kind::kHeartbeatCd});
  const CdId client = coord_.heartbeat.client;
  if (cd_alive(client)) {
    const std::map<CdId, double> loads = current_loads();
    const LoadProbe probe = [&](CdId cd) -> std::optional<double> {
      if (!cd_alive(cd)) return std::nullopt;
      auto it = loads.find(cd);
      return it == loads.end() ? 0.0 : it->second;
    };
    const HeartbeatRound round = heartbeat_round(coord_.heartbeat, coord_.loads, probe, to_seconds(now));
    observe_client(coord_.heartbeat, true);
    for (const auto& [cd, load] : coord_.loads.loads) result_.load_history.push_back({to_seconds(now), cd, load});
    for (CdId cd : round.newly_suspected) detect_failure(now, cd);
  } else if (observe_client(coord_.heartbeat, false)) {
    detect_failure(now, client);
  }
}

void Simulation::detect_failure(SimTime now, CdId cd) {
  for (FaultRecord& f : result_.faults) {
    if (f.resolved_target == cd.str() && !f.detected_at) f.detected_at = to_seconds(now);
  }
  log::info(fmt::format("t={}s failure of {} detected", seconds_text(now), cd.str()));
  RecoveryCosts costs{sc_.message_delay_s, 0.001};
  RecoveryJob job{CdRecovery(cd, coord_, derive_seed(sc_.rng_seed, kStreamRecovery, recoveries_started_++), costs,
                             to_seconds(now)),
                  false};
  if (job.recovery.report().was_client) {
    if (!jobs_.empty()) jobs_.front().needs_restart = true;
    ++job_gen_;
    job_running_ = false;
    jobs_.push_front(std::move(job));
  } else {
    jobs_.push_back(std::move(job));
  }
  check_orphans(now);
  start_next_recovery(now);
}

void Simulation::start_next_recovery(SimTime now) {
  if (job_running_ || jobs_.empty()) return;
  RecoveryJob& job = jobs_.front();
  if (job.needs_restart) {
    job.recovery.restart(coord_);
    job.needs_restart = false;
  }
  job_running_ = true;
  schedule(now, Ev{Kind::kRecoveryPhase, -1, 0, job_gen_});
}

void Simulation::on_recovery_phase(SimTime now, std::uint64_t gen) {
  if (gen != job_gen_ || jobs_.empty()) return;
  RecoveryJob& job = jobs_.front();
  if (job.recovery.next_phase() != CdRecovery::Phase::kElectClient && !cd_alive(coord_.heartbeat.client)) {
    // The coordinator running the recovery crashed; wait for the servers
    // to notice and elect a successor.
    job.needs_restart = true;
    job_running_ = false;
    return;
  }
  const double duration = job.recovery.run_next(coord_, *store_, to_seconds(now));
  const SimTime next = now + from_seconds(duration);
  check_orphans(next);
  if (job.recovery.done()) {
    result_.recoveries.push_back(job.recovery.report());
    jobs_.pop_front();
    job_running_ = false;
    start_next_recovery(next);
  } else {
    schedule(next, Ev{Kind::kRecoveryPhase, -1, 0, gen});
  }
}

void Simulation::check_orphans(SimTime now) {
  for (FaultRecord& f : result_.faults) {
    if (f.spec.kind != FaultKind::kKillCd || f.resolved_target.empty() || f.orphans_cleared_at) continue;
    const CdId dead = CdId::parse(f.resolved_target);
    bool orphaned = false;
    for (std::size_t i : active_) {
      try {
        if (store_->get(*result_.requests[i].id).processed_by == dead) {
          orphaned = true;
          break;
        }
      } catch (const Unavailable&) {
      }
    }
    if (!orphaned) f.orphans_cleared_at = to_seconds(now);
  }
}

void Simulation::on_heartbeat_sd(SimTime now) {
  schedule(now + heartbeat_interval_, Ev{Kind::kHeartbeatSd});
  std::map<CdId, std::vector<SdId>> polled;
  for (const auto& [sd, owner] : coord_.sd_owner) {
    if (cd_alive(owner) && !sd_misses_.suspected(sd)) polled[owner].push_back(sd);
  }
  std::vector<SdId> lost;
  for (const auto& [owner, list] : polled) {
    const SdRound round =
        sd_heartbeat_round(sd_misses_, list, [&](SdId sd) { return sds_[static_cast<std::size_t>(sd.value)].alive; });
    lost.insert(lost.end(), round.newly_suspected.begin(), round.newly_suspected.end());
  }
  if (lost.empty()) return;
  for (SdId sd : lost) {
    for (FaultRecord& f : result_.faults) {
      if (f.resolved_target == sd.str() && !f.detected_at) f.detected_at = to_seconds(now);
    }
  }
  std::vector<SdId> remaining;
  for (const SdState& s : sds_) {
    if (!sd_misses_.suspected(s.id)) remaining.push_back(s.id);
  }
  Repartition rep;
  try {
    rep = repartition_on_sd_failure(remaining, waypoints_, derive_seed(sc_.rng_seed, kStreamRepartition, repartitions_++),
                                    sc_.energy);
  } catch (const Escalation& e) {
    result_.escalations.push_back(e.what());
    for (SdId sd : lost) coord_.sd_owner.erase(sd);
    return;
  }
  if (!rep.feasibility.all_feasible) {
    result_.escalations.push_back("repartitioned tours exceed drone endurance; additional service drones needed");
  }
  for (const Cluster& c : rep.assignment.clusters) {
    SdState& s = sds_[static_cast<std::size_t>(c.sd.value)];
    std::vector<GeoPoint> pts{position_at(s.path, sc_.sd_speed_mps, now)};
    if (c.waypoints.empty()) {
      pts.push_back(c.centroid);
    } else {
      pts.insert(pts.end(), c.waypoints.begin(), c.waypoints.end());
    }
    s.path = make_path(std::move(pts), 1, now);
  }
  for (SdId sd : lost) coord_.sd_owner.erase(sd);
  if (!coord_.hovers.empty()) {
    for (const auto& [sd, cd] : assign_sd_owners(rep.assignment, coord_.hovers)) coord_.sd_owner[sd] = cd;
  }
}

void Simulation::on_fault(SimTime now, std::size_t f) {
  FaultRecord& rec = result_.faults[f];
  for (std::size_t i : active_) rec.active_before.push_back(*result_.requests[i].id);
  if (rec.spec.kind == FaultKind::kKillSd) {
    const SdId sd = SdId::parse(rec.spec.target);
    rec.resolved_target = sd.str();
    sds_[static_cast<std::size_t>(sd.value)].alive = false;
    log::info(fmt::format("t={}s fault: {} crashed", seconds_text(now), sd.str()));
    return;
  }
  const CdId cd = rec.spec.target == "client" ? coord_.heartbeat.client : CdId::parse(rec.spec.target);
  rec.resolved_target = cd.str();
  CdState& state = cds_[static_cast<std::size_t>(cd.value)];
  if (!state.alive) {
    log::warn(fmt::format("t={}s fault: {} already down", seconds_text(now), cd.str()));
    return;
  }
  log::info(fmt::format("t={}s fault: {} crashed", seconds_text(now), cd.str()));
  state.alive = false;
  store_->fail(cd);
  for (RequestQueue* q : {&state.pr, &state.ar}) {
    for (const auto& entry : q->drain()) lose(index_.at(entry.request.id), RequestOutcome::kLostInPipeline);
  }
  check_orphans(now);
  if (std::none_of(cds_.begin(), cds_.end(), [](const CdState& c) { return c.alive; })) {
    escalate(now, "total coordinator loss: every coordinator drone has crashed");
  }
}

void Simulation::escalate(SimTime now, std::string msg) {
  log::warn(fmt::format("t={}s escalation: {}", seconds_text(now), msg));
  result_.escalations.push_back(std::move(msg));
  terminated_ = true;
}

}  // namespace

RunResult run(const Scenario& scenario) {
  Simulation sim(scenario);
  return sim.run();
}

namespace {

using Json = nlohmann::json;

}  // namespace

Metrics collect_metrics(const RunResult& result) {
  Metrics m;
  std::unordered_map<RequestId, const EvacuationRequest*> rows;
  for (const auto& r : result.final_rows) rows.emplace(r.id, &r);

  std::string csv =
      "# firescape requests v1\n"
      "index,rid,sd,cid_e,cid_p,outcome,t_d,t_detection,t_pr_enqueue,t_route_start,t_route_done,t_ar_enqueue,"
      "t_insert_start,t_e,t_processed,detection_latency_s,transport_s,pr_wait_s,route_gen_s,ar_wait_s,insert_s,"
      "end_to_end_s,route_length_m,expansions\n";
  for (std::size_t i = 0; i < result.requests.size(); ++i) {
    const LatencyRecord& r = result.requests[i];
    const auto row_it = r.id ? rows.find(*r.id) : rows.end();
    const std::string cid_p = row_it != rows.end() ? row_it->second->processed_by.str() : std::string();
    csv += fmt::format("{},{},{},{},{},{},{}", i, r.id ? r.id->str() : "", r.sd.str(),
                       r.receiver ? r.receiver->str() : "", cid_p, to_string(r.outcome), seconds_text(r.t_detected));
    if (r.stored()) {
      csv += fmt::format(",{},{},{},{},{},{},{},{}", seconds_text(r.t_detection), seconds_text(r.t_pr_enqueue),
                         seconds_text(r.t_route_start), seconds_text(r.t_route_done), seconds_text(r.t_ar_enqueue),
                         seconds_text(r.t_insert_start), seconds_text(r.t_stored),
                         r.t_processed ? seconds_text(*r.t_processed) : "");
      csv += fmt::format(",{},{},{},{},{},{},{},{:.3f},{}\n", seconds_text(r.detection_latency()),
                         seconds_text(r.transport()), seconds_text(r.pr_wait()), seconds_text(r.route_gen()),
                         seconds_text(r.ar_wait()), seconds_text(r.insert()), seconds_text(r.end_to_end()),
                         r.route_length_m, r.expansions);
    } else {
      csv += ",,,,,,,,,,,,,,,,,\n";
    }
  }
  m.requests_csv = std::move(csv);

  std::string ts = "# firescape timeseries v1\nt_end_s,total_rows,updated_rows\n";
  for (const auto& p : result.timeseries) ts += fmt::format("{:.6f},{},{}\n", p.t_end, p.total_rows, p.updated_rows);
  m.timeseries_csv = std::move(ts);

  Json recoveries = Json::array();
  std::set<RequestId> reassigned;
  for (const RecoveryReport& r : result.recoveries) {
    Json phases = Json::array();
    for (const auto& p : r.phases) {
      phases.push_back({{"name", p.name}, {"started_at", p.started_at}, {"duration_s", p.duration_s}});
    }
    Json received = Json::object();
    for (const auto& [cd, n] : r.received) received[cd.str()] = n;
    Json handed = Json::array();
    for (SdId sd : r.sds_handed_over) handed.push_back(sd.str());
    reassigned.insert(r.reassigned_ids.begin(), r.reassigned_ids.end());
    recoveries.push_back({{"failed", r.failed.str()},
                          {"was_client", r.was_client},
                          {"new_client", r.new_client ? Json(r.new_client->str()) : Json()},
                          {"detected_at", r.detected_at},
                          {"orphaned", r.orphaned},
                          {"reassigned", r.reassigned},
                          {"received", std::move(received)},
                          {"copies_repaired", r.copies_repaired},
                          {"sds_handed_over", std::move(handed)},
                          {"restarts", r.restarts},
                          {"completed", r.completed},
                          {"phases", std::move(phases)},
                          {"total_s", r.total_s()}});
  }
  Json faults = Json::array();
  for (const FaultRecord& f : result.faults) {
    faults.push_back({{"t", f.spec.t},
                      {"kind", f.spec.kind == FaultKind::kKillCd ? "kill_cd" : "kill_sd"},
                      {"target", f.spec.target},
                      {"resolved_target", f.resolved_target},
                      {"active_before", f.active_before.size()},
                      {"detected_at", f.detected_at ? Json(*f.detected_at) : Json()},
                      {"orphans_cleared_at", f.orphans_cleared_at ? Json(*f.orphans_cleared_at) : Json()}});
  }
  Json loads = Json::array();
  for (const LoadSample& s : result.load_history) loads.push_back({{"t", s.t}, {"cd", s.cd.str()}, {"load_m", s.load_m}});
  const Json report = {{"recoveries", std::move(recoveries)},
                       {"faults", std::move(faults)},
                       {"escalations", result.escalations},
                       {"load_history", std::move(loads)}};
  m.recovery_json = report.dump(2) + "\n";

  std::vector<double> e2e;
  std::map<RequestOutcome, std::size_t> outcomes;
  for (const LatencyRecord& r : result.requests) {
    ++outcomes[r.outcome];
    if (r.stored()) e2e.push_back(to_seconds(r.end_to_end()) * 1000.0);
  }
  std::sort(e2e.begin(), e2e.end());
  std::size_t reassigned_done = 0;
  for (const RequestId& id : reassigned) {
    auto it = rows.find(id);
    if (it != rows.end() && it->second->status == RequestStatus::kProcessed) ++reassigned_done;
  }
  std::string s;
  s += fmt::format("requests_created {}\n", result.created());
  s += fmt::format("requests_processed {}\n", result.processed());
  s += fmt::format("requests_unserved {}\n", result.unserved());
  for (const auto& [o, n] : outcomes) {
    if (o != RequestOutcome::kProcessed) s += fmt::format("  {} {}\n", to_string(o), n);
  }
  if (e2e.empty()) {
    s += "end_to_end_median_ms n/a\nend_to_end_p95_ms n/a\n";
  } else {
    s += fmt::format("end_to_end_median_ms {:.3f}\n", percentile_sorted(e2e, 50.0));
    s += fmt::format("end_to_end_p95_ms {:.3f}\n", percentile_sorted(e2e, 95.0));
  }
  s += fmt::format("recoveries {}\n", result.recoveries.size());
  s += fmt::format("requests_reassigned {}\n", reassigned.size());
  s += fmt::format("reassigned_processed {}\n", reassigned_done);
  if (reassigned.empty()) {
    s += "reassignment_success_rate n/a\n";
  } else {
    s += fmt::format("reassignment_success_rate {:.2f}%\n",
                     100.0 * static_cast<double>(reassigned_done) / static_cast<double>(reassigned.size()));
  }
  s += fmt::format("escalations {}\n", result.escalations.size());
  s += fmt::format("end_time_s {:.6f}\n", result.end_time_s);
  s += fmt::format("hit_time_limit {}\n", result.hit_time_limit);
  m.summary = std::move(s);

  for (const auto& row : result.final_rows) m.store_jsonl += to_json_line(row) + "\n";

  if (!result.trajectories.empty()) {
    Json features = Json::array();
    for (const auto& [id, pts] : result.trajectories) {
      Json coords = Json::array();
      for (const GeoPoint& p : pts) coords.push_back({p.lon, p.lat});
      Json geom = pts.size() == 1 ? Json{{"type", "Point"}, {"coordinates", coords[0]}}
                                  : Json{{"type", "LineString"}, {"coordinates", coords}};
      features.push_back({{"type", "Feature"}, {"geometry", geom}, {"properties", {{"rid", id.str()}}}});
    }
    m.trajectories_geojson = Json{{"type", "FeatureCollection"}, {"features", features}}.dump(1) + "\n";
  }
  return m;
}

}  // namespace firescape
