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
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firescape/geo.h"
#include "firescape/ids.h"
#include "firescape/rng.h"
#include "firescape/router.h"

namespace firescape {

inline constexpr double kArrivalToleranceM = 5.0;

enum class RequestStatus { kPending, kActive, kProcessed };

std::string_view to_string(RequestStatus s);
RequestStatus parse_status(std::string_view text);

/// What a service drone reports when it spots someone.
struct Detection {
  SdId sd;
  double t_detected = 0.0;
  GeoPoint location;
};

/// One evacuee tracked from first sighting to arrival at a safe location.
/// Status only moves forward: PENDING -> ACTIVE -> PROCESSED.
struct EvacuationRequest {
  RequestId id;
  double t_detected = 0.0;               // sighting time (sim seconds)
  std::optional<double> t_stored;        // datastore insertion time
  GeoPoint detected_at;
  std::vector<GeoPoint> safe_locations;
  SdId detected_by;
  CdId received_by;                      // first coordinator to receive it
  CdId processed_by;                     // coordinator currently responsible
  std::vector<GeoPoint> escape_route;    // empty until ACTIVE
  GeoPoint last_position;
  double t_last_update = 0.0;
  std::size_t next_waypoint = 0;
  double route_length_m = 0.0;
  RequestStatus status = RequestStatus::kPending;
};

/// Seeded 128-bit identifiers shaped like version-4 UUIDs.
class RequestIdGenerator {
 public:
  explicit RequestIdGenerator(std::uint64_t seed) : rng_(seed) {}
  RequestId next();

 private:
  Rng rng_;
};

EvacuationRequest create_request(const Detection& detection, CdId receiving_cd, std::span<const GeoPoint> safes,
                                 RequestIdGenerator& ids);

/// PENDING -> ACTIVE with the route attached and next_waypoint reset.
/// Throws StateError unless the request is PENDING, ContractViolation for
/// an empty route or t_now before the sighting.
void activate(EvacuationRequest& req, const Route& route, double t_now);

/// Throws StateError describing the first broken invariant.
void check_invariants(const EvacuationRequest& req);

bool has_arrived(const EvacuationRequest& req, double tolerance_m = kArrivalToleranceM);

/// Single-line JSON encoding used for store dumps.
std::string to_json_line(const EvacuationRequest& req);
EvacuationRequest parse_json_line(std::string_view line);

/// Virtual time in integer microseconds, so stage durations add up exactly.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosPerSecond = 1'000'000;

constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / static_cast<double>(kMicrosPerSecond); }

/// Rounds to the nearest microsecond.
SimTime from_seconds(double seconds);

/// FIFO stage between two pipeline threads of a coordinator.
class RequestQueue {
 public:
  struct Entry {
    EvacuationRequest request;
    SimTime enqueued_at = 0;
  };

  void push(EvacuationRequest req, SimTime now) { items_.push_back({std::move(req), now}); }

  /// Throws ContractViolation when empty.
  Entry pop();

  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  /// Drops everything (the host crashed); returns what was lost.
  std::vector<Entry> drain();

 private:
  std::deque<Entry> items_;
};

}  // namespace firescape
