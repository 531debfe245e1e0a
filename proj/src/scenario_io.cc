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

#include "firescape/scenario_io.h"

#include <cmath>
#include <fstream>
#include <system_error>
#include <unistd.h>

#include <fmt/format.h>

#include "firescape/errors.h"
#include "firescape/ids.h"
#include "firescape/log.h"
#include "json_util.h"

namespace firescape {

namespace fs = std::filesystem;
using detail::Json;

namespace {

Ring parse_ring(const Json& coords, const std::string& ctx) {
  if (!coords.is_array()) throw ParseError(fmt::format("{}: ring must be an array of positions", ctx));
  Ring ring;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    GeoPoint p = detail::position_to_point(coords[i], fmt::format("{} position {}", ctx, i));
    if (!ring.empty() && ring.back() == p) continue;
    ring.push_back(p);
  }
  if (ring.size() > 1 && ring.front() == ring.back()) ring.pop_back();
  return ring;
}

FirePolygon parse_polygon(const Json& rings, const std::string& name, const std::string& ctx) {
  if (!rings.is_array() || rings.empty()) throw ParseError(fmt::format("{}: polygon has no rings", ctx));
  FirePolygon poly;
  poly.name = name;
  poly.exterior = parse_ring(rings[0], ctx + " exterior");
  for (std::size_t h = 1; h < rings.size(); ++h) {
    poly.holes.push_back(parse_ring(rings[h], fmt::format("{} hole {}", ctx, h - 1)));
  }
  try {
    validate_polygon(poly);
  } catch (const Error& e) {
    throw LoadError(fmt::format("{}: {}", ctx, e.what()));
  }
  return poly;
}

const Json& features_of(const Json& doc, const std::string& origin) {
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection") {
    throw ParseError(fmt::format("{}: expected a GeoJSON FeatureCollection", origin));
  }
  auto it = doc.find("features");
  if (it == doc.end() || !it->is_array()) throw ParseError(fmt::format("{}: 'features' must be an array", origin));
  return *it;
}

std::string string_at(const Json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) throw ParseError(fmt::format("{}: missing or non-string '{}'", ctx, key));
  return it->get<std::string>();
}

Json position(const GeoPoint& p) { return Json::array({p.lon, p.lat}); }

}  // namespace

std::vector<FirePolygon> load_fire_polygons(const fs::path& path, std::vector<std::string>* warnings) {
  const std::string origin = path.string();
  const Json doc = detail::read_json_file(path);
  const Json& features = features_of(doc, origin);
  std::vector<FirePolygon> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Json& f = features[i];
    const std::string ctx = fmt::format("{} feature {}", origin, i);
    if (!f.is_object()) throw ParseError(ctx + ": feature must be an object");
    std::string name = fmt::format("feature-{}", i);
    if (auto props = f.find("properties"); props != f.end() && props->is_object()) {
      if (auto n = props->find("name"); n != props->end() && n->is_string()) name = n->get<std::string>();
    }
    const auto geom = f.find("geometry");
    const std::string type = (geom != f.end() && geom->is_object()) ? geom->value("type", "") : "";
    if (type == "Polygon") {
      out.push_back(parse_polygon(geom->value("coordinates", Json()), name, ctx));
    } else if (type == "MultiPolygon") {
      const Json coords = geom->value("coordinates", Json());
      if (!coords.is_array()) throw ParseError(ctx + ": MultiPolygon coordinates must be an array");
      for (std::size_t part = 0; part < coords.size(); ++part) {
        out.push_back(parse_polygon(coords[part], fmt::format("{}#{}", name, part), fmt::format("{} part {}", ctx, part)));
      }
    } else {
      const std::string msg =
          fmt::format("{}: skipping non-polygon geometry '{}'", ctx, type.empty() ? std::string("none") : type);
      log::warn(msg);
      if (warnings) warnings->push_back(msg);
    }
  }
  return out;
}

std::vector<GeoPoint> load_safe_locations(const fs::path& path) {
  const std::string origin = path.string();
  const Json doc = detail::read_json_file(path);
  const Json& features = features_of(doc, origin);
  std::vector<GeoPoint> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string ctx = fmt::format("{} feature {}", origin, i);
    const Json& f = features[i];
    const auto geom = f.is_object() ? f.find("geometry") : f.end();
    if (geom == f.end() || !geom->is_object() || geom->value("type", "") != "Point") {
      throw ParseError(ctx + ": safe locations must be Point features");
    }
    out.push_back(detail::position_to_point(geom->value("coordinates", Json()), ctx));
  }
  return out;
}

GroundGraph read_ground_graph(const fs::path& path) {
  const std::string origin = path.string();
  const Json doc = detail::read_json_file(path);
  if (!doc.is_object()) throw ParseError(origin + ": ground graph must be a JSON object");
  const auto nodes_it = doc.find("nodes");
  const auto edges_it = doc.find("edges");
  if (nodes_it == doc.end() || !nodes_it->is_array()) throw ParseError(origin + ": 'nodes' must be an array");
  if (edges_it == doc.end() || !edges_it->is_array()) throw ParseError(origin + ": 'edges' must be an array");

  std::vector<GroundGraph::Node> nodes;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes_it->size(); ++i) {
    const Json& n = (*nodes_it)[i];
    const std::string ctx = fmt::format("{} node {}", origin, i);
    if (!n.is_object()) throw ParseError(ctx + ": node must be an object");
    GroundGraph::Node node;
    node.id = string_at(n, "id", ctx);
    node.pos = {detail::number_at(n, "lat", ctx), detail::number_at(n, "lon", ctx)};
    if (!is_valid(node.pos)) throw LoadError(fmt::format("{} ('{}'): coordinate out of range", ctx, node.id));
    if (!index.emplace(node.id, i).second) throw LoadError(fmt::format("{}: duplicate node id '{}'", ctx, node.id));
    nodes.push_back(std::move(node));
  }

  std::vector<GroundGraph::Edge> edges;
  for (std::size_t i = 0; i < edges_it->size(); ++i) {
    const Json& e = (*edges_it)[i];
    const std::string ctx = fmt::format("{} edge {}", origin, i);
    if (!e.is_object()) throw ParseError(ctx + ": edge must be an object");
    const std::string u = string_at(e, "u", ctx);
    const std::string v = string_at(e, "v", ctx);
    const double len = detail::number_at(e, "length_m", ctx);
    const std::string label = fmt::format("{} ({} - {})", ctx, u, v);
    auto iu = index.find(u);
    auto iv = index.find(v);
    if (iu == index.end()) throw LoadError(fmt::format("{}: unknown endpoint '{}'", label, u));
    if (iv == index.end()) throw LoadError(fmt::format("{}: unknown endpoint '{}'", label, v));
    if (!std::isfinite(len) || len < 0.0) throw LoadError(fmt::format("{}: negative length {}", label, len));
    if (len == 0.0) throw LoadError(fmt::format("{}: zero length", label));
    edges.push_back({iu->second, iv->second, len, 0.0, 0.0});
  }
  try {
    return GroundGraph(std::move(nodes), std::move(edges));
  } catch (const LoadError& e) {
    throw LoadError(fmt::format("{}: {}", origin, e.what()));
  }
}

GroundGraph load_ground_graph(const fs::path& path, const ElevationProvider& provider, int samples_per_edge,
                              GainMode mode) {
  return augment_elevation(read_ground_graph(path), provider, samples_per_edge, mode);
}

std::string ground_graph_to_json(const GroundGraph& g) {
  Json nodes = Json::array();
  for (const auto& n : g.nodes()) nodes.push_back({{"id", n.id}, {"lat", n.pos.lat}, {"lon", n.pos.lon}});
  Json edges = Json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"u", g.node(e.u).id}, {"v", g.node(e.v).id}, {"length_m", e.length_m}});
  }
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}}.dump(1) + "\n";
}

void save_ground_graph(const GroundGraph& g, const fs::path& path) { write_file_atomic(path, ground_graph_to_json(g)); }

std::string route_to_geojson(const Route& route) {
  if (route.waypoints.empty()) throw ContractViolation("cannot export an empty route");
  Json geometry;
  if (route.waypoints.size() == 1) {
    geometry = {{"type", "Point"}, {"coordinates", position(route.waypoints[0])}};
  } else {
    Json coords = Json::array();
    for (const GeoPoint& p : route.waypoints) coords.push_back(position(p));
    geometry = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
  }
  Json props = {{"length_m", route.length_m},
                {"cost", route.cost},
                {"goal_index", route.goal_index},
                {"goal", position(route.goal)},
                {"node_ids", route.node_ids}};
  Json feature = {{"type", "Feature"}, {"geometry", std::move(geometry)}, {"properties", std::move(props)}};
  return feature.dump(1) + "\n";
}

void export_route(const Route& route, const fs::path& path) { write_file_atomic(path, route_to_geojson(route)); }

std::vector<GeoPoint> parse_route_geojson(const fs::path& path) {
  const std::string origin = path.string();
  Json doc = detail::read_json_file(path);
  if (doc.is_object() && doc.value("type", "") == "FeatureCollection") {
    const Json& features = features_of(doc, origin);
    if (features.empty()) throw ParseError(origin + ": route collection is empty");
    doc = features[0];
  }
  if (doc.is_object() && doc.value("type", "") == "Feature") doc = doc.value("geometry", Json());
  const std::string type = doc.is_object() ? doc.value("type", "") : "";
  if (type == "Point") return {detail::position_to_point(doc.value("coordinates", Json()), origin)};
  if (type != "LineString") throw ParseError(origin + ": route must be a LineString or Point");
  const Json coords = doc.value("coordinates", Json());
  if (!coords.is_array()) throw ParseError(origin + ": LineString coordinates must be an array");
  std::vector<GeoPoint> out;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    out.push_back(detail::position_to_point(coords[i], fmt::format("{} position {}", origin, i)));
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(fmt::format("write to '{}' failed", path.string()));
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(fmt::format("cannot move output into '{}': {}", path.string(), ec.message()));
  }
}

namespace {

// Typed readers for optional scenario fields.
class Section {
 public:
  Section(const Json& obj, std::string ctx) : obj_(obj), ctx_(std::move(ctx)) {}

  const Json* find(const char* key) const {
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const char* key, double& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_number()) throw ParseError(fmt::format("{}.{}: expected a number", ctx_, key));
      out = v->get<double>();
    }
  }

  void count(const char* key, std::size_t& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < 0) {
        throw ParseError(fmt::format("{}.{}: expected a non-negative integer", ctx_, key));
      }
      out = v->get<std::size_t>();
    }
  }

  void integer(const char* key, int& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_number_integer()) throw ParseError(fmt::format("{}.{}: expected an integer", ctx_, key));
      out = v->get<int>();
    }
  }

  void flag(const char* key, bool& out) const {
    if (const Json* v = find(key)) {
      if (!v->is_boolean()) throw ParseError(fmt::format("{}.{}: expected true or false", ctx_, key));
      out = v->get<bool>();
    }
  }

  std::string text(const char* key) const {
    const Json* v = find(key);
    if (!v || !v->is_string()) throw ParseError(fmt::format("{}.{}: expected a string", ctx_, key));
    return v->get<std::string>();
  }

  Section sub(const char* key) const {
    const Json* v = find(key);
    if (!v || !v->is_object()) throw ParseError(fmt::format("{}.{}: expected an object", ctx_, key));
    return Section(*v, ctx_ + "." + key);
  }

  const Json& json() const { return obj_; }
  const std::string& ctx() const { return ctx_; }

 private:
  const Json& obj_;
  std::string ctx_;
};

ElevationProvider parse_elevation(const Section& s, const fs::path& base) {
  const std::string mode = s.text("mode");
  if (mode == "constant") {
    detail::reject_unknown_keys(s.json(), {"mode", "value"}, s.ctx());
    double v = 0.0;
    s.number("value", v);
    return ElevationProvider::constant(v);
  }
  if (mode == "plane") {
    detail::reject_unknown_keys(s.json(), {"mode", "a", "b", "c"}, s.ctx());
    double a = 0.0, b = 0.0, c = 0.0;
    s.number("a", a);
    s.number("b", b);
    s.number("c", c);
    return ElevationProvider::plane(a, b, c);
  }
  if (mode == "grid") {
    detail::reject_unknown_keys(s.json(), {"mode", "path"}, s.ctx());
    return ElevationProvider::load_grid(base / s.text("path"));
  }
  throw ParseError(fmt::format("{}.mode: unknown elevation mode '{}'", s.ctx(), mode));
}

}  // namespace

Scenario load_scenario(const fs::path& path) {
  const Json doc = detail::read_json_file(path);
  const std::string root_ctx = "scenario";
  detail::reject_unknown_keys(doc,
                              {"fire_polygons", "safe_locations", "ground_graph", "elevation", "samples_per_edge",
                               "gain_mode", "prune_crossing_edges", "fleet", "timing", "detection", "weights",
                               "rng_seed", "perimeter", "energy", "store", "heartbeat", "walk", "delays",
                               "route_timing", "faults", "trajectories"},
                              root_ctx);
  const Section root(doc, root_ctx);
  const fs::path base = path.parent_path();
  Scenario sc;
  sc.weights = {1.0, 1.0};

  for (const char* key : {"fire_polygons", "safe_locations", "ground_graph", "fleet"}) {
    if (!root.find(key)) throw ParseError(fmt::format("scenario: missing required key '{}'", key));
  }

  if (root.find("elevation")) sc.elevation = parse_elevation(root.sub("elevation"), base);
  root.integer("samples_per_edge", sc.samples_per_edge);
  if (root.find("gain_mode")) {
    const std::string m = root.text("gain_mode");
    if (m == "endpoint") {
      sc.gain_mode = GainMode::kEndpoint;
    } else if (m == "piecewise") {
      sc.gain_mode = GainMode::kPiecewise;
    } else {
      throw ParseError(fmt::format("scenario.gain_mode: expected 'endpoint' or 'piecewise', got '{}'", m));
    }
  }
  root.flag("prune_crossing_edges", sc.prune_crossing_edges);
  root.flag("trajectories", sc.trajectories);

  {
    const Section s = root.sub("fleet");
    detail::reject_unknown_keys(s.json(), {"sd_count", "cd_count"}, s.ctx());
    s.count("sd_count", sc.sd_count);
    s.count("cd_count", sc.cd_count);
  }
  if (root.find("timing")) {
    const Section s = root.sub("timing");
    detail::reject_unknown_keys(s.json(),
                                {"frame_interval_s", "heartbeat_interval_s", "walk_update_interval_s", "sd_speed_mps",
                                 "walk_speed_mps", "surveillance_duration_s", "max_sim_time_s"},
                                s.ctx());
    s.number("frame_interval_s", sc.frame_interval_s);
    s.number("heartbeat_interval_s", sc.heartbeat_interval_s);
    s.number("walk_update_interval_s", sc.walk_update_interval_s);
    s.number("sd_speed_mps", sc.sd_speed_mps);
    s.number("walk_speed_mps", sc.walk_speed_mps);
    s.number("surveillance_duration_s", sc.surveillance_duration_s);
    s.number("max_sim_time_s", sc.max_sim_time_s);
  }
  if (root.find("detection")) {
    const Section s = root.sub("detection");
    detail::reject_unknown_keys(s.json(), {"p_start", "p_end"}, s.ctx());
    s.number("p_start", sc.p_start);
    s.number("p_end", sc.p_end);
  }
  if (root.find("weights")) {
    const Section s = root.sub("weights");
    detail::reject_unknown_keys(s.json(), {"alpha", "beta"}, s.ctx());
    s.number("alpha", sc.weights.alpha);
    s.number("beta", sc.weights.beta);
  }
  if (const Json* seed = root.find("rng_seed")) {
    if (!seed->is_number_unsigned()) throw ParseError("scenario.rng_seed: expected a non-negative integer");
    sc.rng_seed = seed->get<std::uint64_t>();
  }
  if (root.find("perimeter")) {
    const Section s = root.sub("perimeter");
    detail::reject_unknown_keys(s.json(), {"max_spacing_m", "candidate_count", "include_transit_leg", "base_station"},
                                s.ctx());
    s.number("max_spacing_m", sc.max_spacing_m);
    s.count("candidate_count", sc.candidate_count);
    s.flag("include_transit_leg", sc.include_transit_leg);
    if (const Json* bs = s.find("base_station")) sc.base_station = detail::position_to_point(*bs, s.ctx() + ".base_station");
  }
  if (root.find("energy")) {
    const Section s = root.sub("energy");
    detail::reject_unknown_keys(s.json(), {"flight_endurance_s"}, s.ctx());
    s.number("flight_endurance_s", sc.energy.flight_endurance_s);
  }
  if (root.find("store")) {
    const Section s = root.sub("store");
    detail::reject_unknown_keys(s.json(), {"replication_factor"}, s.ctx());
    s.count("replication_factor", sc.replication_factor);
  }
  if (root.find("heartbeat")) {
    const Section s = root.sub("heartbeat");
    detail::reject_unknown_keys(s.json(), {"miss_threshold"}, s.ctx());
    s.integer("miss_threshold", sc.miss_threshold);
  }
  if (root.find("walk")) {
    const Section s = root.sub("walk");
    detail::reject_unknown_keys(s.json(), {"arrival_tolerance_m", "literal_checkpoints"}, s.ctx());
    s.number("arrival_tolerance_m", sc.arrival_tolerance_m);
    s.flag("literal_checkpoints", sc.literal_walk);
  }
  if (root.find("delays")) {
    const Section s = root.sub("delays");
    detail::reject_unknown_keys(s.json(), {"detection_latency_s", "message_delay_s"}, s.ctx());
    s.number("detection_latency_s", sc.detection_latency_s);
    s.number("message_delay_s", sc.message_delay_s);
  }
  if (root.find("route_timing")) {
    const Section s = root.sub("route_timing");
    detail::reject_unknown_keys(s.json(), {"mode", "base_s", "per_expansion_s"}, s.ctx());
    if (s.find("mode")) {
      const std::string m = s.text("mode");
      if (m == "modeled") {
        sc.route_timing.mode = RouteTimingMode::kModeled;
      } else if (m == "measured") {
        sc.route_timing.mode = RouteTimingMode::kMeasured;
      } else {
        throw ParseError(fmt::format("scenario.route_timing.mode: expected 'modeled' or 'measured', got '{}'", m));
      }
    }
    s.number("base_s", sc.route_timing.base_s);
    s.number("per_expansion_s", sc.route_timing.per_expansion_s);
  }
  if (const Json* faults = root.find("faults")) {
    if (!faults->is_array()) throw ParseError("scenario.faults: expected an array");
    for (std::size_t i = 0; i < faults->size(); ++i) {
      const Section s((*faults)[i], fmt::format("scenario.faults[{}]", i));
      detail::reject_unknown_keys(s.json(), {"t", "kind", "target"}, s.ctx());
      FaultSpec f;
      f.t = detail::number_at(s.json(), "t", s.ctx());
      const std::string kind = s.text("kind");
      if (kind == "kill_cd") {
        f.kind = FaultKind::kKillCd;
      } else if (kind == "kill_sd") {
        f.kind = FaultKind::kKillSd;
      } else {
        throw ParseError(fmt::format("{}.kind: expected 'kill_cd' or 'kill_sd', got '{}'", s.ctx(), kind));
      }
      f.target = s.text("target");
      sc.faults.push_back(std::move(f));
    }
  }
  sc.energy.speed_mps = sc.sd_speed_mps;

  sc.fire_polygons = load_fire_polygons(base / root.text("fire_polygons"));
  sc.safe_locations = load_safe_locations(base / root.text("safe_locations"));
  sc.ground_graph_source = base / root.text("ground_graph");
  sc.validate();
  sc.graph = load_ground_graph(sc.ground_graph_source, sc.elevation, sc.samples_per_edge, sc.gain_mode);
  return sc;
}

void Scenario::validate() const {
  auto require = [](bool ok, std::string_view field, std::string_view rule) {
    if (!ok) throw LoadError(fmt::format("scenario.{} {}", field, rule));
  };
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  auto non_negative = [](double x) { return std::isfinite(x) && x >= 0.0; };

  require(sd_count >= 1, "fleet.sd_count", "must be >= 1");
  require(cd_count >= 1, "fleet.cd_count", "must be >= 1");
  require(positive(frame_interval_s), "timing.frame_interval_s", "must be > 0");
  require(positive(heartbeat_interval_s), "timing.heartbeat_interval_s", "must be > 0");
  require(positive(walk_update_interval_s), "timing.walk_update_interval_s", "must be > 0");
  require(positive(sd_speed_mps), "timing.sd_speed_mps", "must be > 0");
  require(positive(walk_speed_mps), "timing.walk_speed_mps", "must be > 0");
  require(non_negative(surveillance_duration_s), "timing.surveillance_duration_s", "must be >= 0");
  require(positive(max_sim_time_s), "timing.max_sim_time_s", "must be > 0");
  require(p_end >= 0.0 && p_end <= p_start && p_start <= 1.0, "detection",
          "must satisfy 0 <= p_end <= p_start <= 1");
  try {
    weights.validate();
  } catch (const Error& e) {
    throw LoadError(fmt::format("scenario.weights {}", e.what()));
  }
  require(samples_per_edge >= 0, "samples_per_edge", "must be >= 0");
  require(positive(max_spacing_m), "perimeter.max_spacing_m", "must be > 0");
  require(candidate_count >= cd_count, "perimeter.candidate_count", "must be >= fleet.cd_count");
  require(positive(energy.flight_endurance_s), "energy.flight_endurance_s", "must be > 0");
  require(replication_factor >= 1, "store.replication_factor", "must be >= 1");
  require(miss_threshold >= 1, "heartbeat.miss_threshold", "must be >= 1");
  require(non_negative(arrival_tolerance_m), "walk.arrival_tolerance_m", "must be >= 0");
  require(non_negative(detection_latency_s), "delays.detection_latency_s", "must be >= 0");
  require(non_negative(message_delay_s), "delays.message_delay_s", "must be >= 0");
  require(non_negative(route_timing.base_s), "route_timing.base_s", "must be >= 0");
  require(non_negative(route_timing.per_expansion_s), "route_timing.per_expansion_s", "must be >= 0");
  require(!fire_polygons.empty(), "fire_polygons", "contains no polygon");
  require(!safe_locations.empty(), "safe_locations", "contains no safe location");
  for (std::size_t i = 0; i < faults.size(); ++i) {
    const FaultSpec& f = faults[i];
    const std::string field = fmt::format("faults[{}]", i);
    require(non_negative(f.t), field + ".t", "must be >= 0");
    try {
      if (f.target == "client") {
        require(f.kind == FaultKind::kKillCd, field + ".target", "'client' only applies to kill_cd");
      } else if (f.kind == FaultKind::kKillCd) {
        const CdId cd = CdId::parse(f.target);
        require(cd.value >= 0 && static_cast<std::size_t>(cd.value) < cd_count, field + ".target", "is not in the fleet");
      } else {
        const SdId sd = SdId::parse(f.target);
        require(sd.value >= 0 && static_cast<std::size_t>(sd.value) < sd_count, field + ".target", "is not in the fleet");
      }
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      throw LoadError(fmt::format("scenario.{}.target {}", field, e.what()));
    }
  }
}

}  // namespace firescape

namespace firescape {

std::string fire_polygons_to_geojson(std::span<const FirePolygon> polys) {
  auto ring_json = [](const Ring& ring) {
    Json coords = Json::array();
    for (const GeoPoint& p : ring) coords.push_back(position(p));
    if (!ring.empty()) coords.push_back(position(ring.front()));
    return coords;
  };
  Json features = Json::array();
  for (const FirePolygon& poly : polys) {
    Json rings = Json::array({ring_json(poly.exterior)});
    for (const Ring& hole : poly.holes) rings.push_back(ring_json(hole));
    features.push_back({{"type", "Feature"},
                        {"properties", {{"name", poly.name}}},
                        {"geometry", {{"type", "Polygon"}, {"coordinates", std::move(rings)}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(1) + "\n";
}

std::string safe_locations_to_geojson(std::span<const GeoPoint> safes) {
  Json features = Json::array();
  for (const GeoPoint& p : safes) {
    features.push_back({{"type", "Feature"},
                        {"properties", Json::object()},
                        {"geometry", {{"type", "Point"}, {"coordinates", position(p)}}}});
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}}.dump(1) + "\n";
}

void save_scenario(const Scenario& sc, const fs::path& dir) {
  fs::create_directories(dir);
  write_file_atomic(dir / "fires.geojson", fire_polygons_to_geojson(sc.fire_polygons));
  write_file_atomic(dir / "safe_locations.geojson", safe_locations_to_geojson(sc.safe_locations));
  save_ground_graph(sc.graph, dir / "graph.json");

  Json elevation;
  const auto& mode = sc.elevation.mode();
  if (const auto* c = std::get_if<ElevationProvider::Constant>(&mode)) {
    elevation = {{"mode", "constant"}, {"value", c->value_m}};
  } else if (const auto* p = std::get_if<ElevationProvider::Plane>(&mode)) {
    elevation = {{"mode", "plane"}, {"a", p->a}, {"b", p->b}, {"c", p->c}};
  } else {
    const auto& g = std::get<ElevationProvider::Grid>(mode);
    const Json grid = {{"origin", {g.origin.lat, g.origin.lon}}, {"cell_deg", g.cell_deg}, {"rows", g.rows}};
    write_file_atomic(dir / "elevation.json", grid.dump() + "\n");
    elevation = {{"mode", "grid"}, {"path", "elevation.json"}};
  }

  Json faults = Json::array();
  for (const FaultSpec& f : sc.faults) {
    faults.push_back({{"t", f.t}, {"kind", f.kind == FaultKind::kKillCd ? "kill_cd" : "kill_sd"}, {"target", f.target}});
  }
  Json perimeter = {{"max_spacing_m", sc.max_spacing_m},
                    {"candidate_count", sc.candidate_count},
                    {"include_transit_leg", sc.include_transit_leg}};
  if (sc.base_station) perimeter["base_station"] = position(*sc.base_station);

  const Json doc = {
      {"fire_polygons", "fires.geojson"},
      {"safe_locations", "safe_locations.geojson"},
      {"ground_graph", "graph.json"},
      {"elevation", std::move(elevation)},
      {"samples_per_edge", sc.samples_per_edge},
      {"gain_mode", sc.gain_mode == GainMode::kEndpoint ? "endpoint" : "piecewise"},
      {"prune_crossing_edges", sc.prune_crossing_edges},
      {"fleet", {{"sd_count", sc.sd_count}, {"cd_count", sc.cd_count}}},
      {"timing",
       {{"frame_interval_s", sc.frame_interval_s},
        {"heartbeat_interval_s", sc.heartbeat_interval_s},
        {"walk_update_interval_s", sc.walk_update_interval_s},
        {"sd_speed_mps", sc.sd_speed_mps},
        {"walk_speed_mps", sc.walk_speed_mps},
        {"surveillance_duration_s", sc.surveillance_duration_s},
        {"max_sim_time_s", sc.max_sim_time_s}}},
      {"detection", {{"p_start", sc.p_start}, {"p_end", sc.p_end}}},
      {"weights", {{"alpha", sc.weights.alpha}, {"beta", sc.weights.beta}}},
      {"rng_seed", sc.rng_seed},
      {"perimeter", std::move(perimeter)},
      {"energy", {{"flight_endurance_s", sc.energy.flight_endurance_s}}},
      {"store", {{"replication_factor", sc.replication_factor}}},
      {"heartbeat", {{"miss_threshold", sc.miss_threshold}}},
      {"walk", {{"arrival_tolerance_m", sc.arrival_tolerance_m}, {"literal_checkpoints", sc.literal_walk}}},
      {"delays", {{"detection_latency_s", sc.detection_latency_s}, {"message_delay_s", sc.message_delay_s}}},
      {"route_timing",
       {{"mode", sc.route_timing.mode == RouteTimingMode::kModeled ? "modeled" : "measured"},
        {"base_s", sc.route_timing.base_s},
        {"per_expansion_s", sc.route_timing.per_expansion_s}}},
      {"faults", std::move(faults)},
      {"trajectories", sc.trajectories},
  };
  write_file_atomic(dir / "scenario.json", doc.dump(2) + "\n");
}

}  // namespace firescape
