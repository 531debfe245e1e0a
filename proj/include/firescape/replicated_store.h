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

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <unordered_map>
#include <variant>
#include <vector>

#include "firescape/ids.h"
#include "firescape/request.h"

namespace firescape {

inline constexpr std::size_t kDefaultReplicationFactor = 3;

struct StoreAck {
  std::vector<CdId> replicas;  // replicas that applied the write
  bool degraded = false;       // fewer than the replication factor
};

namespace store_query {
struct ByProcessor {
  CdId cd;
};
struct ByStatus {
  RequestStatus status;
};
struct ById {
  RequestId id;
};
struct All {};
}  // namespace store_query

using StorePredicate =
    std::variant<store_query::ByProcessor, store_query::ByStatus, store_query::ById, store_query::All>;

/// In-process stand-in for the coordinators' replicated datastore. Each
/// coordinator hosts one replica; a write lands on the inserting coordinator
/// and the next k-1 live coordinators in ring (ascending id) order and is
/// acknowledged only once all of them applied it. Replicas fail crash-stop.
///
/// Every operation is atomic with respect to the others; callers serialize
/// access (the simulator's event loop does).
class ReplicatedStore {
 public:
  explicit ReplicatedStore(std::vector<CdId> members, std::size_t replication_factor = kDefaultReplicationFactor);

  /// Stamps t_stored = t_now (and lifts t_last_update to at least t_now).
  /// Throws Unavailable if `at` is not live, StateError on a duplicate id.
  StoreAck insert(CdId at, EvacuationRequest req, double t_now);

  /// Applies a guided-walk position update to every live holder. Throws
  /// NotFound for unknown ids and StateError for non-ACTIVE rows, a
  /// decreasing waypoint index or a timestamp going backwards.
  StoreAck update_location(const RequestId& id, const GeoPoint& position, double t_update, std::size_t next_waypoint);

  /// ACTIVE -> PROCESSED; the stored position must be within tolerance of
  /// the final waypoint.
  StoreAck mark_processed(const RequestId& id, double t_now, double tolerance_m = kArrivalToleranceM);

  /// Hands the request to another coordinator.
  StoreAck reassign(const RequestId& id, CdId new_processor);

  /// Matching rows ordered by (t_stored, id). Throws Unavailable when no
  /// replica is live or some row has lost every copy.
  std::vector<EvacuationRequest> query(const StorePredicate& pred) const;

  /// Same query answered from a single replica's local table.
  std::vector<EvacuationRequest> query_replica(CdId replica, const StorePredicate& pred) const;

  EvacuationRequest get(const RequestId& id) const;
  bool contains(const RequestId& id) const { return directory_.contains(id); }

  /// Crash-stop failure of a replica; its table becomes unreadable.
  void fail(CdId cd);

  /// Copies under-replicated rows onto further live members until each row
  /// has min(k, live) copies. Returns the number of copies made.
  std::size_t repair();

  bool is_live(CdId cd) const;
  std::vector<CdId> live_members() const;
  std::vector<CdId> live_holders(const RequestId& id) const;
  std::size_t replication_factor() const { return k_; }

  std::size_t row_count() const { return directory_.size(); }
  std::size_t count(RequestStatus s) const { return status_counts_[static_cast<int>(s)]; }
  std::uint64_t update_count() const { return update_count_; }

  /// One JSON line per row, (t_stored, id) order.
  void dump_jsonl(std::ostream& os) const;

 private:
  struct Replica {
    bool live = true;
    std::unordered_map<RequestId, EvacuationRequest> rows;
  };

  const EvacuationRequest& read(const RequestId& id) const;
  template <class Fn>
  StoreAck write(const RequestId& id, Fn&& apply);
  std::vector<CdId> placement(CdId at, std::size_t copies) const;

  std::map<CdId, Replica> replicas_;
  std::unordered_map<RequestId, std::vector<CdId>> directory_;  // every holder, dead ones too
  std::size_t k_;
  std::size_t status_counts_[3] = {0, 0, 0};
  std::uint64_t update_count_ = 0;
};

}  // namespace firescape
