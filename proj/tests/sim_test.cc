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

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <set>

#include "firescape/errors.h"
#include "firescape/event_queue.h"
#include "firescape/synthetic.h"
#include "support.h"

namespace firescape {
namespace {

Scenario small(std::size_t sds, std::size_t cds, double duration_s) {
  Scenario sc = make_synthetic_scenario();
  sc.sd_count = sds;
  sc.cd_count = cds;
  sc.surveillance_duration_s = duration_s;
  return sc;
}

TEST(EventQueue, OrdersByTimeThenInsertion) {
  Rng rng(1);
  EventQueue<int> q;
  std::vector<std::pair<SimTime, int>> pushed;
  for (int i = 0; i < 2000; ++i) {
    const SimTime t = static_cast<SimTime>(rng.index(50));
    q.push(t, i);
    pushed.emplace_back(t, i);
  }
  std::stable_sort(pushed.begin(), pushed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [t, v] : pushed) {
    const auto item = q.pop();
    EXPECT_EQ(item.t, t);
    EXPECT_EQ(item.payload, v);
  }
  EXPECT_TRUE(q.empty());
  EXPECT_THROW(q.pop(), ContractViolation);
}

TEST(Percentile, MatchesNearestRankOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(60);
    std::vector<double> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(rng.uniform(0, 1000));
    std::sort(v.begin(), v.end());
    for (int q = 0; q <= 100; q += 5) {
      // Smallest sample with at least q percent of the data at or below it.
      std::size_t k = 0;
      while (k + 1 < n && (k + 1) * 100 < static_cast<std::size_t>(q) * n) ++k;
      EXPECT_EQ(percentile_sorted(v, q), v[k]) << "n=" << n << " q=" << q;
    }
  }
  EXPECT_THROW(percentile_sorted({}, 50), ContractViolation);
  EXPECT_THROW(percentile_sorted({1.0}, 101), ContractViolation);
}

TEST(NearestCoordinator, MatchesLinearScan) {
  Rng rng(3);
  const GeoPoint c{38.5, -121.5};
  for (int trial = 0; trial < 200; ++trial) {
    std::map<CdId, GeoPoint> hovers;
    const std::size_t m = 1 + rng.index(8);
    for (std::size_t i = 0; i < m; ++i) {
      hovers.emplace(CdId{static_cast<int>(i)}, offset_m(c, rng.uniform(-2000, 2000), rng.uniform(-2000, 2000)));
    }
    const GeoPoint sd = offset_m(c, rng.uniform(-2500, 2500), rng.uniform(-2500, 2500));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [cd, h] : hovers) best = std::min(best, haversine(sd, h));
    EXPECT_EQ(haversine(sd, hovers.at(nearest_coordinator(sd, hovers))), best);
  }
  EXPECT_THROW(nearest_coordinator(c, {}), Unavailable);
}

TEST(Run, ZeroDetectionProbabilityMeansNoRequests) {
  Scenario sc = small(4, 2, 60);
  sc.p_start = 0;
  sc.p_end = 0;
  const RunResult r = run(sc);
  EXPECT_EQ(r.created(), 0u);
  EXPECT_TRUE(r.final_rows.empty());
  EXPECT_TRUE(r.escalations.empty());
}

TEST(Run, OneDroneOneCoordinatorCertainDetection) {
  Scenario sc = small(1, 1, 20);
  sc.frame_interval_s = 2;
  sc.p_start = 1;
  sc.p_end = 1;
  const RunResult r = run(sc);
  EXPECT_EQ(r.created(), 10u);
  EXPECT_EQ(r.processed(), 10u);
  EXPECT_EQ(r.final_rows.size(), 10u);
  for (const auto& row : r.final_rows) EXPECT_EQ(row.status, RequestStatus::kProcessed);
}

TEST(Run, SameSeedSameOutputs) {
  const Scenario sc = small(6, 3, 120);
  const Metrics a = collect_metrics(run(sc));
  const Metrics b = collect_metrics(run(sc));
  EXPECT_EQ(a.requests_csv, b.requests_csv);
  EXPECT_EQ(a.timeseries_csv, b.timeseries_csv);
  EXPECT_EQ(a.store_jsonl, b.store_jsonl);
  EXPECT_EQ(a.summary, b.summary);
  Scenario other = sc;
  other.rng_seed = sc.rng_seed + 1;
  EXPECT_NE(collect_metrics(run(other)).requests_csv, a.requests_csv);
}

TEST(Run, ConservationAndStageSums) {
  Scenario sc = small(8, 3, 180);
  sc.faults = {{60.0, FaultKind::kKillCd, "cd-1"}};
  const RunResult r = run(sc);
  ASSERT_GT(r.created(), 0u);
  std::size_t stored = 0;
  std::size_t processed = 0;
  for (const auto& rec : r.requests) {
    EXPECT_NE(rec.outcome, RequestOutcome::kInFlight);
    if (rec.outcome == RequestOutcome::kProcessed) ++processed;
    if (!rec.stored()) continue;
    ++stored;
    EXPECT_EQ(rec.detection_latency() + rec.transport() + rec.pr_wait() + rec.route_gen() + rec.ar_wait() +
                  rec.insert(),
              rec.end_to_end());
    EXPECT_GE(rec.pr_wait(), 0);
    EXPECT_GE(rec.ar_wait(), 0);
    const SimTime modeled = from_seconds(sc.route_timing.base_s +
                                         static_cast<double>(rec.expansions) * sc.route_timing.per_expansion_s);
    EXPECT_EQ(rec.route_gen(), modeled);
  }
  EXPECT_EQ(processed, r.processed());
  EXPECT_EQ(r.final_rows.size(), stored);
  std::set<RequestId> ids;
  for (const auto& row : r.final_rows) EXPECT_TRUE(ids.insert(row.id).second);
}

TEST(Run, TotalRowsNeverDecrease) {
  const RunResult r = run(small(6, 3, 200));
  for (std::size_t i = 1; i < r.timeseries.size(); ++i) {
    EXPECT_GE(r.timeseries[i].total_rows, r.timeseries[i - 1].total_rows);
  }
  ASSERT_FALSE(r.timeseries.empty());
  EXPECT_EQ(r.timeseries.back().updated_rows, 0u);
  EXPECT_EQ(r.timeseries.back().total_rows, r.final_rows.size());
}

TEST(Run, KillingOnlyCoordinatorEscalates) {
  Scenario sc = small(3, 1, 120);
  sc.faults = {{30.0, FaultKind::kKillCd, "cd-0"}};
  const RunResult r = run(sc);
  ASSERT_FALSE(r.escalations.empty());
  EXPECT_NE(r.escalations.back().find("every coordinator"), std::string::npos);
  EXPECT_TRUE(r.live_clients.empty());
}

TEST(Run, ClientFailureRecovers) {
  Scenario sc = small(10, 4, 300);
  sc.faults = {{100.0, FaultKind::kKillCd, "client"}};
  const RunResult r = run(sc);
  EXPECT_TRUE(r.escalations.empty());
  ASSERT_EQ(r.faults.size(), 1u);
  const FaultRecord& f = r.faults[0];
  ASSERT_TRUE(f.detected_at.has_value());
  EXPECT_LE(*f.detected_at - 100.0, sc.miss_threshold * sc.heartbeat_interval_s + sc.heartbeat_interval_s);
  ASSERT_TRUE(f.orphans_cleared_at.has_value());
  EXPECT_EQ(r.live_clients.size(), 1u);
  EXPECT_NE(r.live_clients[0].str(), f.resolved_target);
  EXPECT_FALSE(r.recoveries.empty());
}

TEST(Metrics, CsvShape) {
  Scenario sc = small(4, 2, 60);
  sc.trajectories = true;
  const RunResult r = run(sc);
  const Metrics m = collect_metrics(r);
  EXPECT_EQ(static_cast<std::size_t>(std::count(m.requests_csv.begin(), m.requests_csv.end(), '\n')),
            r.created() + 2);  // version comment and header
  EXPECT_EQ(static_cast<std::size_t>(std::count(m.store_jsonl.begin(), m.store_jsonl.end(), '\n')),
            r.final_rows.size());
  EXPECT_NE(m.summary.find("end_to_end_median_ms"), std::string::npos);
  EXPECT_FALSE(m.trajectories_geojson.empty());
}

}  // namespace
}  // namespace firescape
