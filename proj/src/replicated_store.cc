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

#include "firescape/replicated_store.h"

#include <algorithm>

#include <fmt/format.h>

#include "firescape/errors.h"

namespace firescape {
namespace {

bool matches(const EvacuationRequest& r, const StorePredicate& pred) {
  struct Visitor {
    const EvacuationRequest& r;
    bool operator()(const store_query::ByProcessor& q) const { return r.processed_by == q.cd; }
    bool operator()(const store_query::ByStatus& q) const { return r.status == q.status; }
    bool operator()(const store_query::ById& q) const { return r.id == q.id; }
    bool operator()(const store_query::All&) const { return true; }
  };
  return std::visit(Visitor{r}, pred);
}

void sort_rows(std::vector<EvacuationRequest>& rows) {
  std::sort(rows.begin(), rows.end(), [](const EvacuationRequest& a, const EvacuationRequest& b) {
    const double ta = a.t_stored.value_or(0.0);
    const double tb = b.t_stored.value_or(0.0);
    if (ta != tb) return ta < tb;
    return a.id < b.id;
  });
}

}  // namespace

ReplicatedStore::ReplicatedStore(std::vector<CdId> members, std::size_t replication_factor) : k_(replication_factor) {
  if (members.empty()) throw ContractViolation("replicated store needs at least one member");
  if (k_ == 0) throw ContractViolation("replication factor must be >= 1");
  for (CdId cd : members) {
    if (!replicas_.emplace(cd, Replica{}).second) {
      throw ContractViolation(fmt::format("duplicate store member {}", cd.str()));
    }
  }
}

bool ReplicatedStore::is_live(CdId cd) const {
  auto it = replicas_.find(cd);
  return it != replicas_.end() && it->second.live;
}

std::vector<CdId> ReplicatedStore::live_members() const {
  std::vector<CdId> out;
  for (const auto& [cd, rep] : replicas_) {
    if (rep.live) out.push_back(cd);
  }
  return out;
}

std::vector<CdId> ReplicatedStore::placement(CdId at, std::size_t copies) const {
  // `at` first, then the following live members wrapping around the ring.
  std::vector<CdId> out{at};
  auto start = replicas_.find(at);
  auto it = start;
  while (out.size() < copies) {
    ++it;
    if (it == replicas_.end()) it = replicas_.begin();
    if (it == start) break;
    if (it->second.live) out.push_back(it->first);
  }
  return out;
}

StoreAck ReplicatedStore::insert(CdId at, EvacuationRequest req, double t_now) {
  if (!is_live(at)) throw Unavailable(fmt::format("insert at {}: replica not live", at.str()));
  if (directory_.contains(req.id)) throw StateError(fmt::format("request {} already stored", req.id.str()));
  req.t_stored = t_now;
  req.t_last_update = std::max(req.t_last_update, t_now);
  check_invariants(req);

  const std::size_t live = live_members().size();
  StoreAck ack;
  ack.replicas = placement(at, std::min(k_, live));
  ack.degraded = ack.replicas.size() < k_;
  for (CdId cd : ack.replicas) replicas_.at(cd).rows.emplace(req.id, req);
  directory_.emplace(req.id, ack.replicas);
  ++status_counts_[static_cast<int>(req.status)];
  return ack;
}

const EvacuationRequest& ReplicatedStore::read(const RequestId& id) const {
  auto dir = directory_.find(id);
  if (dir == directory_.end()) throw NotFound(fmt::format("request {} not in store", id.str()));
  for (CdId cd : dir->second) {
    const Replica& rep = replicas_.at(cd);
    if (rep.live) return rep.rows.at(id);
  }
  throw Unavailable(fmt::format("request {}: every replica holding it has failed", id.str()));
}

template <class Fn>
StoreAck ReplicatedStore::write(const RequestId& id, Fn&& apply) {
  EvacuationRequest next = read(id);  // throws NotFound / Unavailable
  const RequestStatus before = next.status;
  apply(next);
  check_invariants(next);
  StoreAck ack;
  for (CdId cd : directory_.at(id)) {
    Replica& rep = replicas_.at(cd);
    if (!rep.live) continue;
    rep.rows.at(id) = next;
    ack.replicas.push_back(cd);
  }
  ack.degraded = ack.replicas.size() < k_;
  if (before != next.status) {
    --status_counts_[static_cast<int>(before)];
    ++status_counts_[static_cast<int>(next.status)];
  }
  return ack;
}

StoreAck ReplicatedStore::update_location(const RequestId& id, const GeoPoint& position, double t_update,
                                          std::size_t next_waypoint) {
  StoreAck ack = write(id, [&](EvacuationRequest& r) {
    if (r.status != RequestStatus::kActive) {
      throw StateError(fmt::format("request {}: location update while {}", id.str(), to_string(r.status)));
    }
    if (next_waypoint < r.next_waypoint) {
      throw StateError(fmt::format("request {}: waypoint index would decrease {} -> {}", id.str(), r.next_waypoint,
                                   next_waypoint));
    }
    if (t_update < r.t_last_update) {
      throw StateError(fmt::format("request {}: update time {} before last update {}", id.str(), t_update,
                                   r.t_last_update));
    }
    r.last_position = position;
    r.t_last_update = t_update;
    r.next_waypoint = next_waypoint;
  });
  ++update_count_;
  return ack;
}

StoreAck ReplicatedStore::mark_processed(const RequestId& id, double t_now, double tolerance_m) {
  return write(id, [&](EvacuationRequest& r) {
    if (r.status != RequestStatus::kActive) {
      throw StateError(fmt::format("request {}: cannot mark PROCESSED from {}", id.str(), to_string(r.status)));
    }
    if (!has_arrived(r, tolerance_m)) {
      throw StateError(fmt::format("request {}: evacuee is {:.1f} m from the safe location (tolerance {} m)", id.str(),
                                   haversine(r.last_position, r.escape_route.back()), tolerance_m));
    }
    r.status = RequestStatus::kProcessed;
    r.t_last_update = std::max(r.t_last_update, t_now);
  });
}

StoreAck ReplicatedStore::reassign(const RequestId& id, CdId new_processor) {
  return write(id, [&](EvacuationRequest& r) { r.processed_by = new_processor; });
}

std::vector<EvacuationRequest> ReplicatedStore::query(const StorePredicate& pred) const {
  if (live_members().empty()) throw Unavailable("store query: no live replica");
  if (const auto* by_id = std::get_if<store_query::ById>(&pred)) {
    if (!directory_.contains(by_id->id)) return {};
    return {read(by_id->id)};
  }
  std::vector<EvacuationRequest> out;
  for (const auto& [id, holders] : directory_) {
    const EvacuationRequest& row = read(id);
    if (matches(row, pred)) out.push_back(row);
  }
  sort_rows(out);
  return out;
}

std::vector<EvacuationRequest> ReplicatedStore::query_replica(CdId replica, const StorePredicate& pred) const {
  auto it = replicas_.find(replica);
  if (it == replicas_.end() || !it->second.live) {
    throw Unavailable(fmt::format("replica {} is not live", replica.str()));
  }
  std::vector<EvacuationRequest> out;
  for (const auto& [id, row] : it->second.rows) {
    if (matches(row, pred)) out.push_back(row);
  }
  sort_rows(out);
  return out;
}

EvacuationRequest ReplicatedStore::get(const RequestId& id) const { return read(id); }

std::vector<CdId> ReplicatedStore::live_holders(const RequestId& id) const {
  std::vector<CdId> out;
  auto dir = directory_.find(id);
  if (dir == directory_.end()) return out;
  for (CdId cd : dir->second) {
    if (replicas_.at(cd).live) out.push_back(cd);
  }
  return out;
}

void ReplicatedStore::fail(CdId cd) {
  auto it = replicas_.find(cd);
  if (it == replicas_.end()) throw NotFound(fmt::format("no store member {}", cd.str()));
  it->second.live = false;
  it->second.rows.clear();
}

std::size_t ReplicatedStore::repair() {
  const std::vector<CdId> live = live_members();
  const std::size_t target = std::min(k_, live.size());
  std::size_t copies = 0;
  for (auto& [id, holders] : directory_) {
    std::vector<CdId> alive = live_holders(id);
    if (alive.empty() || alive.size() >= target) continue;
    const EvacuationRequest row = replicas_.at(alive.front()).rows.at(id);
    for (CdId cd : placement(alive.front(), live.size())) {
      if (alive.size() >= target) break;
      if (std::find(alive.begin(), alive.end(), cd) != alive.end()) continue;
      replicas_.at(cd).rows[id] = row;
      alive.push_back(cd);
      ++copies;
    }
    holders = alive;
  }
  return copies;
}

void ReplicatedStore::dump_jsonl(std::ostream& os) const {
  for (const auto& row : query(store_query::All{})) os << to_json_line(row) << '\n';
}

}  // namespace firescape
