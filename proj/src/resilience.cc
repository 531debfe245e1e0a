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

#include "firescape/resilience.h"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "firescape/log.h"
#include "firescape/rng.h"

namespace firescape {

std::vector<CdId> LoadList::members() const {
  std::vector<CdId> out;
  out.reserve(loads.size());
  for (const auto& [cd, load] : loads) out.push_back(cd);
  return out;
}

HeartbeatRound heartbeat_round(HeartbeatState& state, LoadList& loads, const LoadProbe& probe, double t_now) {
  HeartbeatRound round;
  for (CdId cd : loads.members()) {
    const std::optional<double> load = probe(cd);
    if (cd == state.client) {
      if (load) loads.loads[cd] = *load;
      continue;
    }
    if (load) {
      loads.loads[cd] = *load;
      state.server_misses.record_response(cd);
      round.responders.push_back(cd);
    } else if (state.server_misses.record_miss(cd)) {
      log::info(fmt::format("t={:.3f} {} missed {} heartbeats", t_now, cd.str(), state.miss_threshold()));
      round.newly_suspected.push_back(cd);
    }
  }
  ++loads.version;
  return round;
}

bool observe_client(HeartbeatState& state, bool request_received) {
  if (request_received) {
    state.client_misses = 0;
    return false;
  }
  ++state.client_misses;
  return state.client_misses == state.miss_threshold();
}

CdId elect_client(std::span<const CdId> survivors, std::uint64_t seed) {
  if (survivors.empty()) throw Escalation("no coordinator left to act as heartbeat client");
  std::vector<CdId> sorted(survivors.begin(), survivors.end());
  std::sort(sorted.begin(), sorted.end());
  Rng rng(seed);
  return sorted[rng.index(sorted.size())];
}

std::vector<std::size_t> lpt_assign(std::span<const double> lengths, std::vector<double>& bin_loads) {
  if (bin_loads.empty()) throw ContractViolation("LPT assignment needs at least one bin");
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lengths[a] > lengths[b]; });
  std::vector<std::size_t> bins(lengths.size());
  for (std::size_t item : order) {
    std::size_t best = 0;
    for (std::size_t b = 1; b < bin_loads.size(); ++b) {
      if (bin_loads[b] < bin_loads[best]) best = b;
    }
    bins[item] = best;
    bin_loads[best] += lengths[item];
  }
  return bins;
}

Redistribution redistribute(CdId failed_cd, ReplicatedStore& store, LoadList& loads) {
  loads.loads.erase(failed_cd);
  const std::vector<CdId> live = loads.members();
  if (live.empty()) throw Escalation(fmt::format("{} failed and no coordinator is left", failed_cd.str()));

  std::vector<EvacuationRequest> orphans;
  for (auto& r : store.query(store_query::ByProcessor{failed_cd})) {
    if (r.status == RequestStatus::kActive) orphans.push_back(std::move(r));
  }
  std::vector<double> lengths;
  lengths.reserve(orphans.size());
  for (const auto& r : orphans) lengths.push_back(r.route_length_m);
  std::vector<double> bin_loads;
  for (CdId cd : live) bin_loads.push_back(loads.loads.at(cd));

  const std::vector<std::size_t> bins = lpt_assign(lengths, bin_loads);
  Redistribution out;
  out.orphaned = orphans.size();
  for (std::size_t i = 0; i < orphans.size(); ++i) {
    const CdId target = live[bins[i]];
    store.reassign(orphans[i].id, target);
    out.assignment.emplace(orphans[i].id, target);
  }
  for (std::size_t b = 0; b < live.size(); ++b) loads.loads[live[b]] = bin_loads[b];
  ++loads.version;
  return out;
}

std::map<CdId, GeoPoint> recompute_hovers(std::span<const CdId> live_cds, std::span<const GeoPoint> candidates,
                                          std::uint64_t seed) {
  if (live_cds.empty()) throw Escalation("no coordinator left to place");
  std::vector<CdId> sorted(live_cds.begin(), live_cds.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<GeoPoint> picks = place_coordinators(candidates, sorted.size(), seed);
  std::map<CdId, GeoPoint> out;
  for (std::size_t i = 0; i < sorted.size(); ++i) out.emplace(sorted[i], picks[i]);
  return out;
}

namespace {

std::optional<CdId> nearest_hover(const GeoPoint& p, const std::map<CdId, GeoPoint>& hovers) {
  std::optional<CdId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [cd, hover] : hovers) {
    const double d = haversine(p, hover);
    if (d < best_d) {
      best_d = d;
      best = cd;
    }
  }
  return best;
}

}  // namespace

std::map<SdId, CdId> assign_sd_owners(const SdAssignment& assignment, const std::map<CdId, GeoPoint>& hovers) {
  if (hovers.empty()) throw Escalation("no coordinator left to poll service drones");
  std::map<SdId, CdId> out;
  for (const Cluster& c : assignment.clusters) out.emplace(c.sd, *nearest_hover(c.centroid, hovers));
  return out;
}

SdRound sd_heartbeat_round(MissTracker<SdId>& tracker, std::span<const SdId> sds,
                           const std::function<bool(SdId)>& responds) {
  SdRound round;
  for (SdId sd : sds) {
    if (responds(sd)) {
      tracker.record_response(sd);
      round.responders.push_back(sd);
    } else if (tracker.record_miss(sd)) {
      round.newly_suspected.push_back(sd);
    }
  }
  return round;
}

Repartition repartition_on_sd_failure(std::span<const SdId> remaining_sds, std::span<const GeoPoint> waypoints,
                                      std::uint64_t seed, const EnergyModel& energy) {
  if (remaining_sds.empty()) throw Escalation("every service drone has failed; surveillance lost");
  Repartition out;
  out.assignment = assign_waypoints(waypoints, remaining_sds, seed);
  out.feasibility = check_feasibility(out.assignment, energy);
  if (!out.feasibility.all_feasible) log::warn("repartitioned tours exceed drone endurance");
  return out;
}

double RecoveryReport::total_s() const {
  double t = 0.0;
  for (const auto& p : phases) t += p.duration_s;
  return t;
}

CdRecovery::CdRecovery(CdId failed, CoordinationState& state, std::uint64_t seed, RecoveryCosts costs,
                       double detected_at)
    : seed_(seed), costs_(costs) {
  report_.failed = failed;
  report_.detected_at = detected_at;
  report_.was_client = state.heartbeat.client == failed;
  if (auto it = state.hovers.find(failed); it != state.hovers.end()) {
    failed_hover_ = it->second;
    state.hovers.erase(it);
  }
  state.loads.loads.erase(failed);
  ++state.loads.version;
  state.heartbeat.server_misses.forget(failed);
  phase_ = report_.was_client ? Phase::kElectClient : Phase::kRedistribute;
}

void CdRecovery::restart(const CoordinationState& state) {
  ++report_.restarts;
  phase_ = state.loads.contains(state.heartbeat.client) ? Phase::kRedistribute : Phase::kElectClient;
}

double CdRecovery::run_next(CoordinationState& state, ReplicatedStore& store, double t_now) {
  RecoveryPhase phase;
  phase.started_at = t_now;
  switch (phase_) {
    case Phase::kElectClient: {
      const std::vector<CdId> survivors = state.loads.members();
      const CdId elected = elect_client(survivors, derive_seed(seed_, 1, static_cast<std::uint64_t>(report_.restarts)));
      state.heartbeat.client = elected;
      state.heartbeat.client_misses = 0;
      state.heartbeat.server_misses.forget(elected);
      report_.new_client = elected;
      phase.name = "elect_client";
      phase.duration_s = 2.0 * costs_.message_delay_s;
      phase_ = Phase::kRedistribute;
      break;
    }
    case Phase::kRedistribute: {
      const Redistribution r = redistribute(report_.failed, store, state.loads);
      report_.orphaned = r.orphaned;
      report_.reassigned = r.assignment.size();
      report_.received.clear();
      report_.reassigned_ids.clear();
      for (const auto& [id, cd] : r.assignment) {
        ++report_.received[cd];
        report_.reassigned_ids.push_back(id);
      }
      report_.copies_repaired += store.repair();
      phase.name = "redistribute";
      phase.duration_s = costs_.message_delay_s + costs_.per_request_s * static_cast<double>(r.orphaned);
      phase_ = Phase::kRecomputeHovers;
      break;
    }
    case Phase::kRecomputeHovers: {
      const std::vector<CdId> live = state.loads.members();
      if (live.empty()) throw Escalation("no coordinator left to place");
      if (state.candidates.size() >= live.size()) {
        state.hovers = recompute_hovers(live, state.candidates,
                                        derive_seed(seed_, 2, static_cast<std::uint64_t>(report_.restarts)));
      }
      phase.name = "recompute_hovers";
      phase.duration_s = costs_.message_delay_s;
      phase_ = Phase::kReassignSdDuties;
      break;
    }
    case Phase::kReassignSdDuties: {
      std::map<CdId, GeoPoint> live_hovers;
      for (const auto& [cd, hover] : state.hovers) {
        if (state.loads.contains(cd)) live_hovers.emplace(cd, hover);
      }
      const std::vector<CdId> live = state.loads.members();
      if (live.empty()) throw Escalation("no coordinator left to poll service drones");
      for (auto& [sd, owner] : state.sd_owner) {
        if (state.loads.contains(owner)) continue;
        std::optional<CdId> heir;
        if (failed_hover_) heir = nearest_hover(*failed_hover_, live_hovers);
        owner = heir.value_or(live.front());
        report_.sds_handed_over.push_back(sd);
      }
      phase.name = "reassign_sd_duties";
      phase.duration_s = costs_.message_delay_s;
      phase_ = Phase::kDone;
      report_.completed = true;
      break;
    }
    case Phase::kDone:
      throw StateError(fmt::format("recovery of {} already complete", report_.failed.str()));
  }
  report_.phases.push_back(phase);
  return phase.duration_s;
}

RecoveryReport handle_cd_failure(CdId failed, CoordinationState& state, ReplicatedStore& store, std::uint64_t seed,
                                 RecoveryCosts costs, double detected_at) {
  CdRecovery recovery(failed, state, seed, costs, detected_at);
  double t = detected_at;
  while (!recovery.done()) t += recovery.run_next(state, store, t);
  return recovery.report();
}

}  // namespace firescape
