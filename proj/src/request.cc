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

#include "firescape/request.h"

#include <cmath>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "json_util.h"

namespace firescape {
namespace {

using detail::Json;

Json point_json(const GeoPoint& p) { return Json::array({p.lat, p.lon}); }

GeoPoint point_from(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected [lat, lon]");
  return GeoPoint{j[0].get<double>(), j[1].get<double>()};
}

Json points_json(const std::vector<GeoPoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(point_json(p));
  return arr;
}

std::vector<GeoPoint> points_from(const Json& j) {
  std::vector<GeoPoint> out;
  for (const auto& p : j) out.push_back(point_from(p));
  return out;
}

}  // namespace

std::string_view to_string(RequestStatus s) {
  switch (s) {
    case RequestStatus::kPending:
      return "PENDING";
    case RequestStatus::kActive:
      return "ACTIVE";
    case RequestStatus::kProcessed:
      return "PROCESSED";
  }
  return "?";
}

RequestStatus parse_status(std::string_view text) {
  if (text == "PENDING") return RequestStatus::kPending;
  if (text == "ACTIVE") return RequestStatus::kActive;
  if (text == "PROCESSED") return RequestStatus::kProcessed;
  throw ParseError(fmt::format("unknown request status '{}'", text));
}

RequestId RequestIdGenerator::next() {
  RequestId id{rng_.next(), rng_.next()};
  id.hi = (id.hi & ~0xF000ULL) | 0x4000ULL;                          // version 4
  id.lo = (id.lo & 0x3FFFFFFFFFFFFFFFULL) | 0x8000000000000000ULL;  // RFC 4122 variant
  return id;
}

EvacuationRequest create_request(const Detection& detection, CdId receiving_cd, std::span<const GeoPoint> safes,
                                 RequestIdGenerator& ids) {
  validate(detection.location);
  EvacuationRequest req;
  req.id = ids.next();
  req.t_detected = detection.t_detected;
  req.detected_at = detection.location;
  req.safe_locations.assign(safes.begin(), safes.end());
  req.detected_by = detection.sd;
  req.received_by = receiving_cd;
  req.processed_by = receiving_cd;
  req.last_position = detection.location;
  req.t_last_update = detection.t_detected;
  req.next_waypoint = 0;
  req.status = RequestStatus::kPending;
  return req;
}

void activate(EvacuationRequest& req, const Route& route, double t_now) {
  if (req.status != RequestStatus::kPending) {
    throw StateError(fmt::format("request {}: cannot activate from {}", req.id.str(), to_string(req.status)));
  }
  if (route.waypoints.empty()) throw ContractViolation(fmt::format("request {}: empty escape route", req.id.str()));
  if (t_now < req.t_detected) {
    throw ContractViolation(fmt::format("request {}: activation at {} precedes sighting at {}", req.id.str(), t_now,
                                        req.t_detected));
  }
  req.escape_route = route.waypoints;
  req.route_length_m = route_length(route);
  req.next_waypoint = 0;
  req.status = RequestStatus::kActive;
}

void check_invariants(const EvacuationRequest& req) {
  const std::string id = req.id.str();
  if (req.t_stored) {
    if (*req.t_stored < req.t_detected) {
      throw StateError(fmt::format("request {}: stored at {} before sighting at {}", id, *req.t_stored, req.t_detected));
    }
    if (req.t_last_update < *req.t_stored) {
      throw StateError(fmt::format("request {}: last update {} before storage {}", id, req.t_last_update, *req.t_stored));
    }
  } else if (req.t_last_update < req.t_detected) {
    throw StateError(fmt::format("request {}: last update {} before sighting {}", id, req.t_last_update, req.t_detected));
  }
  if (req.status == RequestStatus::kPending) {
    if (!req.escape_route.empty()) throw StateError(fmt::format("request {}: PENDING with a route", id));
  } else {
    if (req.escape_route.empty()) {
      throw StateError(fmt::format("request {}: {} without a route", id, to_string(req.status)));
    }
    if (!(req.route_length_m >= 0.0)) throw StateError(fmt::format("request {}: negative route length", id));
  }
  if (req.next_waypoint > req.escape_route.size()) {
    throw StateError(fmt::format("request {}: waypoint index {} past route of {}", id, req.next_waypoint,
                                 req.escape_route.size()));
  }
}

bool has_arrived(const EvacuationRequest& req, double tolerance_m) {
  if (req.escape_route.empty()) return false;
  return req.next_waypoint >= req.escape_route.size() ||
         haversine(req.last_position, req.escape_route.back()) <= tolerance_m;
}

std::string to_json_line(const EvacuationRequest& req) {
  Json j;
  j["rid"] = req.id.str();
  j["t_d"] = req.t_detected;
  j["t_e"] = req.t_stored ? Json(*req.t_stored) : Json(nullptr);
  j["lambda_d"] = point_json(req.detected_at);
  j["safe_locations"] = points_json(req.safe_locations);
  j["sid"] = req.detected_by.str();
  j["cid_e"] = req.received_by.str();
  j["cid_p"] = req.processed_by.str();
  j["lambda_esc"] = points_json(req.escape_route);
  j["lambda_f"] = point_json(req.last_position);
  j["t_f"] = req.t_last_update;
  j["ind"] = req.next_waypoint;
  j["len"] = req.route_length_m;
  j["status"] = std::string(to_string(req.status));
  return j.dump();
}

EvacuationRequest parse_json_line(std::string_view line) {
  const Json j = detail::parse_json(line, "request");
  try {
    EvacuationRequest req;
    req.id = RequestId::parse(j.at("rid").get<std::string>());
    req.t_detected = j.at("t_d").get<double>();
    if (!j.at("t_e").is_null()) req.t_stored = j.at("t_e").get<double>();
    req.detected_at = point_from(j.at("lambda_d"));
    req.safe_locations = points_from(j.at("safe_locations"));
    req.detected_by = SdId::parse(j.at("sid").get<std::string>());
    req.received_by = CdId::parse(j.at("cid_e").get<std::string>());
    req.processed_by = CdId::parse(j.at("cid_p").get<std::string>());
    req.escape_route = points_from(j.at("lambda_esc"));
    req.last_position = point_from(j.at("lambda_f"));
    req.t_last_update = j.at("t_f").get<double>();
    req.next_waypoint = j.at("ind").get<std::size_t>();
    req.route_length_m = j.at("len").get<double>();
    req.status = parse_status(j.at("status").get<std::string>());
    return req;
  } catch (const Json::exception& e) {
    throw ParseError(fmt::format("request record: {}", e.what()));
  }
}

SimTime from_seconds(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * static_cast<double>(kMicrosPerSecond)));
}

RequestQueue::Entry RequestQueue::pop() {
  if (items_.empty()) throw ContractViolation("pop from an empty request queue");
  Entry e = std::move(items_.front());
  items_.pop_front();
  return e;
}

std::vector<RequestQueue::Entry> RequestQueue::drain() {
  std::vector<Entry> out(std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
  items_.clear();
  return out;
}

}  // namespace firescape
