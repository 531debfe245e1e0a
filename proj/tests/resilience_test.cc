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

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "firescape/errors.h"
#include "support.h"

namespace firescape {
namespace {

const GeoPoint kBase{38.5, -121.5};

std::vector<CdId> cds(int n) {
  std::vector<CdId> out;
  for (int i = 0; i < n; ++i) out.push_back(CdId{i});
  return out;
}

EvacuationRequest make_active(RequestIdGenerator& ids, CdId cd, double length_m, double t) {
  const GeoPoint goal = offset_m(kBase, length_m, 0);
  EvacuationRequest r = create_request({SdId{0}, t, kBase}, cd, std::vector<GeoPoint>{goal}, ids);
  Route route;
  route.waypoints = {kBase, goal};
  route.leg_lengths_m = {length_m};
  route.length_m = length_m;
  route.goal = goal;
  activate(r, route, t);
  return r;
}

// Exhaustive minimum makespan over every assignment of items to bins.
double optimal_makespan(const std::vector<double>& items, std::size_t bins) {
  std::vector<double> load(bins, 0.0);
  double best = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == items.size()) {
      best = std::min(best, *std::max_element(load.begin(), load.end()));
      return;
    }
    for (std::size_t b = 0; b < bins; ++b) {
      load[b] += items[i];
      self(self, i + 1);
      load[b] -= items[i];
    }
  };
  rec(rec, 0);
  return best;
}

TEST(MissTracker, ReportsThresholdCrossingOnce) {
  MissTracker<CdId> t(3);
  EXPECT_FALSE(t.record_miss(CdId{1}));
  EXPECT_FALSE(t.record_miss(CdId{1}));
  EXPECT_TRUE(t.record_miss(CdId{1}));
  EXPECT_TRUE(t.suspected(CdId{1}));
  EXPECT_FALSE(t.record_miss(CdId{1}));
  t.record_response(CdId{1});
  EXPECT_EQ(t.misses(CdId{1}), 0);
  EXPECT_FALSE(t.suspected(CdId{1}));
}

TEST(Heartbeat, ServerFailureDetectedOnThirdMissedRound) {
  HeartbeatState hb;
  hb.client = CdId{0};
  LoadList loads;
  for (CdId cd : cds(4)) loads.loads[cd] = 0.0;
  std::set<CdId> dead{CdId{2}};
  const LoadProbe probe = [&](CdId cd) -> std::optional<double> {
    if (dead.contains(cd)) return std::nullopt;
    return 10.0 * cd.value;
  };
  std::optional<double> detected;
  for (int round = 1; round <= 5 && !detected; ++round) {
    const double t = round * hb.interval_s;
    const HeartbeatRound r = heartbeat_round(hb, loads, probe, t);
    EXPECT_EQ(r.responders.size(), 2u);
    if (!r.newly_suspected.empty()) {
      EXPECT_EQ(r.newly_suspected, std::vector<CdId>{CdId{2}});
      detected = t;
    }
  }
  ASSERT_TRUE(detected.has_value());
  EXPECT_DOUBLE_EQ(*detected, 3 * kHeartbeatIntervalS);
  EXPECT_EQ(loads.loads.at(CdId{3}), 30.0);
  EXPECT_EQ(loads.version, 3u);
}

TEST(Heartbeat, TransientSilenceDoesNotTrigger) {
  HeartbeatState hb;
  hb.client = CdId{0};
  LoadList loads;
  for (CdId cd : cds(3)) loads.loads[cd] = 0.0;
  int round = 0;
  const LoadProbe probe = [&](CdId cd) -> std::optional<double> {
    if (cd == CdId{1} && round % 3 != 0) return std::nullopt;  // answers every third round
    return 1.0;
  };
  for (round = 1; round <= 30; ++round) {
    EXPECT_TRUE(heartbeat_round(hb, loads, probe, round * 30.0).newly_suspected.empty());
  }
}

TEST(Heartbeat, ClientSilenceTriggersElectionAtThreshold) {
  HeartbeatState hb;
  EXPECT_FALSE(observe_client(hb, false));
  EXPECT_FALSE(observe_client(hb, false));
  EXPECT_FALSE(observe_client(hb, true));
  EXPECT_EQ(hb.client_misses, 0);
  EXPECT_FALSE(observe_client(hb, false));
  EXPECT_FALSE(observe_client(hb, false));
  EXPECT_TRUE(observe_client(hb, false));
  EXPECT_FALSE(observe_client(hb, false));
}

TEST(Election, SeededMemberOfSurvivorsIndependentOfOrder) {
  const std::vector<CdId> s{CdId{7}, CdId{2}, CdId{5}, CdId{3}};
  std::vector<CdId> reversed(s.rbegin(), s.rend());
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CdId c = elect_client(s, seed);
    EXPECT_NE(std::find(s.begin(), s.end(), c), s.end());
    EXPECT_EQ(c, elect_client(reversed, seed));
  }
  EXPECT_THROW(elect_client({}, 1), Escalation);
}

TEST(Election, RoughlyUniform) {
  const auto s = cds(5);
  std::map<CdId, int> hits;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) ++hits[elect_client(s, derive_seed(seed, 9))];
  ASSERT_EQ(hits.size(), 5u);
  for (const auto& [cd, n] : hits) {
    EXPECT_GT(n, 850) << cd;
    EXPECT_LT(n, 1150) << cd;
  }
}

TEST(Lpt, WithinGrahamBoundOfExhaustiveOptimum) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng.index(2);
    const std::size_t n = 1 + rng.index(8);
    std::vector<double> items;
    for (std::size_t i = 0; i < n; ++i) items.push_back(static_cast<double>(1 + rng.index(100)));
    std::vector<double> bins(m, 0.0);
    const auto assign = lpt_assign(items, bins);
    ASSERT_EQ(assign.size(), n);
    std::vector<double> check(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) check[assign[i]] += items[i];
    EXPECT_EQ(check, bins);
    const double makespan = *std::max_element(bins.begin(), bins.end());
    const double opt = optimal_makespan(items, m);
    EXPECT_LE(makespan, (4.0 / 3.0 - 1.0 / (3.0 * static_cast<double>(m))) * opt + 1e-9) << "trial " << trial;
  }
}

TEST(Lpt, LongestFirstToLeastLoaded) {
  std::vector<double> bins{5.0, 0.0, 0.0};
  const std::vector<double> items{1.0, 7.0, 4.0, 4.0};
  const auto a = lpt_assign(items, bins);
  // 7 -> bin 1; 4 -> bin 2; 4 -> bin 2 (4 < 5); 1 -> bin 0 (5 < 7, 8).
  EXPECT_EQ(a, (std::vector<std::size_t>{0, 1, 2, 2}));
  EXPECT_EQ(bins, (std::vector<double>{6.0, 7.0, 8.0}));
  std::vector<double> none;
  EXPECT_THROW(lpt_assign(items, none), ContractViolation);
}

TEST(Redistribute, ClearsOrphansAndBalancesLoads) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + static_cast<int>(rng.index(6));
    ReplicatedStore store(cds(n), 3);
    RequestIdGenerator ids(trial);
    LoadList loads;
    for (CdId cd : cds(n)) loads.loads[cd] = 0.0;
    std::vector<RequestId> processed_ids;
    for (int i = 0; i < 60; ++i) {
      const CdId cd{static_cast<int>(rng.index(n))};
      EvacuationRequest r = make_active(ids, cd, static_cast<double>(10 + rng.index(500)), i);
      store.insert(cd, r, i);
      if (rng.bernoulli(0.2)) {
        store.update_location(r.id, r.escape_route.back(), i + 1.0, 2);
        store.mark_processed(r.id, i + 1.0);
        processed_ids.push_back(r.id);
      } else {
        loads.loads[cd] += r.route_length_m;
      }
    }
    const CdId failed{static_cast<int>(rng.index(n))};
    std::size_t expected_orphans = 0;
    for (const auto& r : store.query(store_query::ByProcessor{failed})) {
      expected_orphans += r.status == RequestStatus::kActive ? 1 : 0;
    }
    store.fail(failed);
    const Redistribution red = redistribute(failed, store, loads);
    EXPECT_EQ(red.orphaned, expected_orphans);
    EXPECT_EQ(red.assignment.size(), expected_orphans);
    EXPECT_FALSE(loads.contains(failed));

    std::map<CdId, double> derived;
    for (const auto& r : store.query(store_query::ByStatus{RequestStatus::kActive})) {
      EXPECT_NE(r.processed_by, failed);
      derived[r.processed_by] += r.route_length_m;
    }
    for (const auto& [cd, load] : loads.loads) EXPECT_NEAR(load, derived[cd], 1e-6);
    for (const auto& id : processed_ids) EXPECT_EQ(store.get(id).status, RequestStatus::kProcessed);
  }
}

TEST(Redistribute, EscalatesWhenNobodyLeft) {
  ReplicatedStore store(cds(1), 1);
  LoadList loads;
  loads.loads[CdId{0}] = 0.0;
  EXPECT_THROW(redistribute(CdId{0}, store, loads), Escalation);
}

TEST(Hovers, OnePerLiveCdFromCandidates) {
  std::vector<GeoPoint> cand;
  Rng rng(4);
  for (int i = 0; i < 50; ++i) cand.push_back(offset_m(kBase, rng.uniform(0, 1000), rng.uniform(0, 1000)));
  const std::vector<CdId> live{CdId{4}, CdId{1}, CdId{6}};
  const auto hovers = recompute_hovers(live, cand, 8);
  ASSERT_EQ(hovers.size(), 3u);
  std::set<std::pair<double, double>> distinct;
  for (const auto& [cd, p] : hovers) {
    EXPECT_NE(std::find(cand.begin(), cand.end(), p), cand.end());
    distinct.insert({p.lat, p.lon});
  }
  EXPECT_EQ(distinct.size(), 3u);
  EXPECT_THROW(recompute_hovers({}, cand, 8), Escalation);
}

TEST(SdOwners, NearestHoverToCentroid) {
  SdAssignment a;
  for (int i = 0; i < 6; ++i) {
    Cluster c;
    c.sd = SdId{i};
    c.centroid = offset_m(kBase, 0, 100.0 * i);
    a.clusters.push_back(c);
  }
  const std::map<CdId, GeoPoint> hovers{{CdId{0}, offset_m(kBase, 0, 0)}, {CdId{1}, offset_m(kBase, 0, 500)}};
  const auto owners = assign_sd_owners(a, hovers);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(owners.at(SdId{i}), i <= 2 ? CdId{0} : CdId{1});
  EXPECT_THROW(assign_sd_owners(a, {}), Escalation);
}

TEST(SdHeartbeat, DeadDroneSuspectedOnce) {
  MissTracker<SdId> tracker(3);
  const std::vector<SdId> sds{SdId{0}, SdId{1}, SdId{2}};
  const auto responds = [](SdId sd) { return sd != SdId{1}; };
  int suspected = 0;
  for (int round = 0; round < 6; ++round) {
    const SdRound r = sd_heartbeat_round(tracker, sds, responds);
    EXPECT_EQ(r.responders.size(), 2u);
    suspected += static_cast<int>(r.newly_suspected.size());
    if (round == 2) EXPECT_EQ(r.newly_suspected, std::vector<SdId>{SdId{1}});
  }
  EXPECT_EQ(suspected, 1);
}

TEST(Repartition, CoversAllWaypointsWithSurvivors) {
  std::vector<GeoPoint> wp;
  for (int i = 0; i < 300; ++i) wp.push_back(offset_m(kBase, 5.0 * i, 0));
  const std::vector<SdId> remaining{SdId{0}, SdId{2}, SdId{5}};
  const Repartition r = repartition_on_sd_failure(remaining, wp, 3, EnergyModel{});
  EXPECT_EQ(r.assignment.clusters.size(), 3u);
  EXPECT_EQ(r.assignment.waypoint_count(), wp.size());
  std::set<SdId> owners;
  for (const auto& c : r.assignment.clusters) owners.insert(c.sd);
  EXPECT_EQ(owners, (std::set<SdId>{SdId{0}, SdId{2}, SdId{5}}));
  EXPECT_TRUE(r.feasibility.all_feasible);
  EXPECT_THROW(repartition_on_sd_failure({}, wp, 3, EnergyModel{}), Escalation);
}

class RecoveryFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    Rng rng(31);
    for (int i = 0; i < 60; ++i) state.candidates.push_back(offset_m(kBase, rng.uniform(0, 2000), rng.uniform(0, 2000)));
    state.hovers = recompute_hovers(cds(4), state.candidates, 1);
    for (CdId cd : cds(4)) state.loads.loads[cd] = 0.0;
    state.heartbeat.client = CdId{0};
    for (int i = 0; i < 8; ++i) state.sd_owner[SdId{i}] = CdId{i % 4};
    RequestIdGenerator ids(5);
    for (int i = 0; i < 20; ++i) {
      const CdId cd{i % 4};
      EvacuationRequest r = make_active(ids, cd, 100.0 + i, i);
      store.insert(cd, r, i);
      state.loads.loads[cd] += r.route_length_m;
    }
  }

  CoordinationState state;
  ReplicatedStore store{cds(4), 3};
};

TEST_F(RecoveryFixture, ServerFailureSkipsElection) {
  store.fail(CdId{2});
  const RecoveryCosts costs{0.005, 0.001};
  const RecoveryReport rep = handle_cd_failure(CdId{2}, state, store, 7, costs, 100.0);
  EXPECT_TRUE(rep.completed);
  EXPECT_FALSE(rep.was_client);
  EXPECT_FALSE(rep.new_client.has_value());
  EXPECT_EQ(state.heartbeat.client, CdId{0});
  ASSERT_EQ(rep.phases.size(), 3u);
  EXPECT_EQ(rep.phases[0].name, "redistribute");
  EXPECT_EQ(rep.orphaned, 5u);
  EXPECT_EQ(rep.reassigned, 5u);
  EXPECT_NEAR(rep.total_s(), 0.005 + 0.001 * 5 + 0.005 + 0.005, 1e-12);
  EXPECT_DOUBLE_EQ(rep.phases[0].started_at, 100.0);
  EXPECT_EQ(state.hovers.size(), 3u);
  EXPECT_FALSE(state.hovers.contains(CdId{2}));
  EXPECT_EQ(rep.sds_handed_over, (std::vector<SdId>{SdId{2}, SdId{6}}));
  for (const auto& [sd, owner] : state.sd_owner) EXPECT_NE(owner, CdId{2});
  EXPECT_TRUE(store.query(store_query::ByProcessor{CdId{2}}).empty());
}

TEST_F(RecoveryFixture, ClientFailureElectsSurvivor) {
  store.fail(CdId{0});
  const RecoveryReport rep = handle_cd_failure(CdId{0}, state, store, 7, {}, 50.0);
  EXPECT_TRUE(rep.was_client);
  ASSERT_TRUE(rep.new_client.has_value());
  EXPECT_NE(*rep.new_client, CdId{0});
  EXPECT_EQ(state.heartbeat.client, *rep.new_client);
  EXPECT_EQ(rep.phases.front().name, "elect_client");
  EXPECT_EQ(rep.phases.size(), 4u);
}

TEST_F(RecoveryFixture, RestartReElectsWhenClientDiesMidRecovery) {
  store.fail(CdId{1});
  CdRecovery rec(CdId{1}, state, 7, {}, 10.0);
  EXPECT_EQ(rec.next_phase(), CdRecovery::Phase::kRedistribute);
  rec.run_next(state, store, 10.0);
  // Client dies before the recovery finishes.
  store.fail(CdId{0});
  state.loads.loads.erase(CdId{0});
  rec.restart(state);
  EXPECT_EQ(rec.next_phase(), CdRecovery::Phase::kElectClient);
  double t = 20.0;
  while (!rec.done()) t += rec.run_next(state, store, t);
  EXPECT_EQ(rec.report().restarts, 1);
  EXPECT_NE(state.heartbeat.client, CdId{0});
  EXPECT_NE(state.heartbeat.client, CdId{1});
  EXPECT_THROW(rec.run_next(state, store, t), StateError);
}

TEST_F(RecoveryFixture, LosingEveryCoordinatorEscalates) {
  for (int i = 0; i < 3; ++i) {
    store.fail(CdId{i});
    handle_cd_failure(CdId{i}, state, store, 7);
  }
  store.fail(CdId{3});
  EXPECT_THROW(handle_cd_failure(CdId{3}, state, store, 7), Escalation);
}

}  // namespace
}  // namespace firescape
