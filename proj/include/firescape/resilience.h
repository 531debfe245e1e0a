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

// Failure handling for the drone fleet: coordinator heartbeats with load
// gossip, client election, request rebalancing after a coordinator loss,
// hover re-placement and service drone re-partitioning.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firescape/geo.h"
#include "firescape/ids.h"
#include "firescape/perimeter.h"
#include "firescape/replicated_store.h"

namespace firescape {

inline constexpr double kHeartbeatIntervalS = 30.0;
inline constexpr int kMissThreshold = 3;

/// Per-coordinator load in meters: summed route lengths of its ACTIVE
/// requests. Holds exactly the coordinators believed alive.
struct LoadList {
  std::map<CdId, double> loads;
  std::uint64_t version = 0;

  bool contains(CdId cd) const { return loads.contains(cd); }
  std::vector<CdId> members() const;
};

/// Consecutive-miss counters. A target becomes suspected when its count
/// reaches the threshold; that transition is reported exactly once.
template <class Id>
class MissTracker {
 public:
  explicit MissTracker(int threshold = kMissThreshold) : threshold_(threshold) {}

  /// True only on the miss that crosses the threshold.
  bool record_miss(Id id) {
    int& m = misses_[id];
    ++m;
    return m == threshold_;
  }
  void record_response(Id id) { misses_[id] = 0; }
  int misses(Id id) const {
    auto it = misses_.find(id);
    return it == misses_.end() ? 0 : it->second;
  }
  bool suspected(Id id) const { return misses(id) >= threshold_; }
  void forget(Id id) { misses_.erase(id); }
  int threshold() const { return threshold_; }

 private:
  int threshold_;
  std::map<Id, int> misses_;
};

enum class HeartbeatRole { kClient, kServer };

struct HeartbeatState {
  CdId client;
  double interval_s = kHeartbeatIntervalS;
  MissTracker<CdId> server_misses{kMissThreshold};
  /// Consecutive intervals in which servers saw no request from the client.
  int client_misses = 0;

  HeartbeatRole role(CdId cd) const { return cd == client ? HeartbeatRole::kClient : HeartbeatRole::kServer; }
  int miss_threshold() const { return server_misses.threshold(); }
};

struct HeartbeatRound {
  std::vector<CdId> responders;
  std::vector<CdId> newly_suspected;
};

/// Returns a server's current load, or nullopt if it did not answer.
using LoadProbe = std::function<std::optional<double>(CdId)>;

/// The client polls every other coordinator in the load list, carrying the
/// current list. Responders' loads are merged and their miss counters reset;
/// silent servers accrue a miss. The client's own load is refreshed from
/// the probe too. Bumps the list version.
HeartbeatRound heartbeat_round(HeartbeatState& state, LoadList& loads, const LoadProbe& probe, double t_now);

/// Server-side view of the client: true exactly when the consecutive
/// missing-request count reaches the threshold and an election is due.
bool observe_client(HeartbeatState& state, bool request_received);

/// Seeded uniform choice over the survivors sorted by id. Throws Escalation
/// (total coordination loss) when there are none.
CdId elect_client(std::span<const CdId> survivors, std::uint64_t seed);

struct Redistribution {
  std::map<RequestId, CdId> assignment;
  std::size_t orphaned = 0;
};

/// LPT bin packing of the failed coordinator's ACTIVE requests: longest
/// route first, each to the currently least-loaded live coordinator (lowest
/// id on ties). Writes the new processors to the store and updates `loads`.
/// Throws Escalation if no live coordinator remains; Unavailable propagates.
Redistribution redistribute(CdId failed_cd, ReplicatedStore& store, LoadList& loads);

/// Assigns lengths to bins (LPT); used by redistribute and by tests.
std::vector<std::size_t> lpt_assign(std::span<const double> lengths, std::vector<double>& bin_loads);

/// Farthest-first re-placement over the survivors, in ascending id order.
std::map<CdId, GeoPoint> recompute_hovers(std::span<const CdId> live_cds, std::span<const GeoPoint> candidates,
                                          std::uint64_t seed);

/// Each SD is polled by the coordinator whose hover is nearest to the SD's
/// cluster centroid (lowest id on ties).
std::map<SdId, CdId> assign_sd_owners(const SdAssignment& assignment, const std::map<CdId, GeoPoint>& hovers);

struct SdRound {
  std::vector<SdId> responders;
  std::vector<SdId> newly_suspected;
};

SdRound sd_heartbeat_round(MissTracker<SdId>& tracker, std::span<const SdId> sds,
                           const std::function<bool(SdId)>& responds);

struct Repartition {
  SdAssignment assignment;
  FeasibilityReport feasibility;
};

/// Re-clusters the full perimeter over the remaining drones and re-checks
/// energy. Throws Escalation when no service drone is left.
Repartition repartition_on_sd_failure(std::span<const SdId> remaining_sds, std::span<const GeoPoint> waypoints,
                                      std::uint64_t seed, const EnergyModel& energy);

/// Fleet coordination state shared by the recovery procedures.
struct CoordinationState {
  HeartbeatState heartbeat;
  LoadList loads;
  std::map<CdId, GeoPoint> hovers;
  std::vector<GeoPoint> candidates;
  std::map<SdId, CdId> sd_owner;
};

/// Simulated costs for the recovery phases.
struct RecoveryCosts {
  double message_delay_s = 0.005;
  double per_request_s = 0.001;
};

struct RecoveryPhase {
  std::string name;
  double started_at = 0.0;
  double duration_s = 0.0;
};

struct RecoveryReport {
  CdId failed;
  bool was_client = false;
  std::optional<CdId> new_client;
  double detected_at = 0.0;
  std::size_t orphaned = 0;
  std::size_t reassigned = 0;
  std::map<CdId, std::size_t> received;  // reassigned requests per coordinator
  std::vector<RequestId> reassigned_ids;
  std::size_t copies_repaired = 0;
  std::vector<SdId> sds_handed_over;
  std::vector<RecoveryPhase> phases;
  int restarts = 0;
  bool completed = false;

  double total_s() const;
};

/// Coordinator-loss recovery as discrete phases so a simulator can spread
/// it over virtual time: elect a client (only if the client died),
/// redistribute orphaned requests, recompute hovers, hand the dead
/// coordinator's SD polling to the nearest survivor.
class CdRecovery {
 public:
  enum class Phase { kElectClient, kRedistribute, kRecomputeHovers, kReassignSdDuties, kDone };

  CdRecovery(CdId failed, CoordinationState& state, std::uint64_t seed, RecoveryCosts costs = {},
             double detected_at = 0.0);

  Phase next_phase() const { return phase_; }
  bool done() const { return phase_ == Phase::kDone; }

  /// Executes the next phase at t_now and returns its simulated duration.
  double run_next(CoordinationState& state, ReplicatedStore& store, double t_now);

  /// Starts over against the current live set, re-electing if the
  /// client is gone.
  void restart(const CoordinationState& state);

  const RecoveryReport& report() const { return report_; }

 private:
  RecoveryReport report_;
  std::optional<GeoPoint> failed_hover_;
  std::uint64_t seed_;
  RecoveryCosts costs_;
  Phase phase_;
};

/// Runs every recovery phase back to back.
RecoveryReport handle_cd_failure(CdId failed, CoordinationState& state, ReplicatedStore& store, std::uint64_t seed,
                                 RecoveryCosts costs = {}, double detected_at = 0.0);

}  // namespace firescape
