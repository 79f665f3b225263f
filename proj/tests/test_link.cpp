// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "rismarl/link/link_layer.hpp"
#include "rismarl/phy/channel.hpp"
#include "rismarl/phy/network_config.hpp"
#include "rismarl/phy/topology.hpp"
#include "sinr_reference.hpp"
#include "support.hpp"

namespace rismarl {
namespace {

using testing::random_row;

TEST(Correlation, Cases) {
  Rng rng(1);
  const CRow h = random_row(6, rng);
  EXPECT_NEAR(channel_correlation(h, h), 1.0, 1e-15);
  EXPECT_NEAR(channel_correlation(h, h * cdouble(-2.0, 3.5)), 1.0, 1e-15);
  CRow a = CRow::Zero(4), b = CRow::Zero(4);
  a(0) = 1;
  b(1) = cdouble(0, 2);
  EXPECT_EQ(channel_correlation(a, b), 0.0);
  EXPECT_THROW(channel_correlation(a, CRow::Zero(4)), InvalidArgument);
}

TEST(Clustering, NoIotGivesSingletons) {
  Rng rng(2);
  std::vector<CRow> ch{random_row(4, rng), random_row(4, rng)};
  const auto c = cluster_users(ch, {0, 1}, {}, 3, 2);
  ASSERT_EQ(c.members.size(), 2u);
  EXPECT_EQ(c.members[0], std::vector<int>{0});
  EXPECT_EQ(c.members[1], std::vector<int>{1});
}

TEST(Clustering, AlignedUserJoinsThatHead) {
  Rng rng(3);
  std::vector<CRow> ch{random_row(8, rng), random_row(8, rng), random_row(8, rng)};
  ch.push_back(ch[1] * cdouble(0.3, -0.2));
  const auto c = cluster_users(ch, {0, 1, 2}, {3}, 2, 3);
  EXPECT_EQ(c.cluster_of[3], 1);
  EXPECT_EQ(c.members[1], (std::vector<int>{1, 3}));
}

TEST(Clustering, TiesGoToLowestCluster) {
  std::vector<CRow> ch(3, CRow::Ones(2));
  const auto c = cluster_users(ch, {0, 1}, {2}, 2, 2);
  EXPECT_EQ(c.cluster_of[2], 0);
}

TEST(Clustering, CapacityRespected) {
  Rng rng(4);
  std::vector<CRow> ch{random_row(6, rng), random_row(6, rng)};
  for (int i = 0; i < 4; ++i) ch.push_back(ch[0] + 0.01 * random_row(6, rng));
  const auto c = cluster_users(ch, {0, 1}, {2, 3, 4, 5}, 3, 2);
  EXPECT_EQ(c.members[0].size(), 3u);
  EXPECT_EQ(c.members[1].size(), 3u);
  EXPECT_THROW(cluster_users(ch, {0, 1}, {2, 3, 4, 5}, 2, 2), InvalidArgument);
  EXPECT_THROW(cluster_users(ch, {0, 1, 2}, {3}, 3, 2), InvalidArgument);
}

TEST(Analog, RealPositiveHeadGivesZeroPhase) {
  std::vector<CRow> heads(2, CRow::Constant(6, cdouble(0.7, 0)));
  for (int bits : {1, 2, 3}) {
    const auto v = analog_beamformer(heads, 3, bits);
    for (int n = 0; n < 2; ++n)
      for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(v(n * 3 + i, n) - cdouble(1 / std::sqrt(3.0), 0)), 0, 1e-15);
    EXPECT_EQ(v(0, 1), cdouble(0, 0));
    EXPECT_EQ(v(3, 0), cdouble(0, 0));
  }
}

TEST(Analog, OneBitPicksNearestOfTwo) {
  Rng rng(5);
  std::vector<CRow> heads{random_row(8, rng), random_row(8, rng)};
  const auto v = analog_beamformer(heads, 4, 1);
  for (int n = 0; n < 2; ++n)
    for (int i = 0; i < 4; ++i) {
      const cdouble h = heads[n](n * 4 + i);
      const cdouble unit = h / std::abs(h);
      // conjugate phase in {0, pi}: +1 when Re h >= 0, else -1
      const double expect = std::abs(1.0 - unit) <= std::abs(-1.0 - unit) ? 1.0 : -1.0;
      EXPECT_NEAR(std::abs(v(n * 4 + i, n) * 2.0 - expect), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(v(n * 4 + i, n)), 0.5, 1e-15);
    }
}

TEST(Analog, ZeroEntryDefaultsToPhaseZero) {
  CRow h = CRow::Ones(2);
  h(1) = 0;
  const auto v = analog_beamformer({h}, 2, 3);
  EXPECT_NEAR(std::abs(v(1, 0) - cdouble(1 / std::sqrt(2.0), 0)), 0, 1e-15);
}

TEST(Zf, OrthonormalCentersInvertExactly) {
  CRow c0(2), c1(2);
  c0 << cdouble(1 / std::sqrt(2.0), 0), cdouble(0, 1 / std::sqrt(2.0));
  c1 << cdouble(0, 1 / std::sqrt(2.0)), cdouble(1 / std::sqrt(2.0), 0);
  const CMat v = CMat::Identity(2, 2);
  const auto r = zf_digital_beamformer({c0, c1}, v);
  CMat H(2, 2);
  H.row(0) = c0;
  H.row(1) = c1;
  EXPECT_LT((r.w - H.adjoint()).norm(), 1e-14);
  EXPECT_LT((H * r.w - CMat::Identity(2, 2)).norm(), 1e-14);
  EXPECT_FALSE(r.regularized);
}

TEST(Zf, NullsOtherCentersAndUnitBeams) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<CRow> centers;
    for (int n = 0; n < 4; ++n) centers.push_back(random_row(16, rng));
    const auto v = analog_beamformer(centers, 4, 3);
    const auto r = zf_digital_beamformer(centers, v);
    for (int n = 0; n < 4; ++n) {
      const CCol beam = v * r.w.col(n);
      EXPECT_NEAR(beam.norm(), 1.0, 1e-12);
      for (int i = 0; i < 4; ++i) {
        if (i == n) continue;
        EXPECT_LT(std::abs((centers[i] * beam)(0)) / centers[i].norm(), 1e-9);
      }
    }
  }
}

TEST(Zf, RawModeMatchesComposedForUnitaryAnalog) {
  Rng rng(7);
  std::vector<CRow> centers{random_row(3, rng), random_row(3, rng), random_row(3, rng)};
  const auto v = analog_beamformer(centers, 1, 2);
  const auto a = zf_digital_beamformer(centers, v, ZfMode::Composed);
  const auto b = zf_digital_beamformer(centers, v, ZfMode::Raw);
  EXPECT_LT((a.w - b.w).norm(), 1e-10);
}

TEST(Zf, RankDeficientIsRegularized) {
  Rng rng(8);
  const CRow c = random_row(4, rng);
  const CMat v = CMat::Identity(4, 2);
  const auto r = zf_digital_beamformer({c, c}, v);
  EXPECT_TRUE(r.regularized);
  EXPECT_TRUE(r.w.allFinite());
}

TEST(DecodingOrder, Cases) {
  EXPECT_EQ(decoding_order({10, 11, 12}, {3, 1, 2}), (std::vector<int>{10, 12, 11}));
  EXPECT_EQ(decoding_order({4}, {0.5}), std::vector<int>{4});
  EXPECT_EQ(decoding_order({7, 3, 5}, {1, 1, 1}), (std::vector<int>{3, 5, 7}));
  EXPECT_THROW(decoding_order({1, 2}, {1.0}), InvalidArgument);
}

// One AP, one cluster: head user 0, IoT users after it. Beam is a fixed unit vector.
struct OneCluster {
  Topology topo;
  EffectiveChannels h;
  LinkLayerPlan plan;
};

OneCluster one_cluster(const std::vector<CRow>& users) {
  OneCluster o;
  const int U = static_cast<int>(users.size());
  o.topo.ap_positions = {{0, 0, 0}};
  o.topo.user_positions.assign(U, {0, 0, 0});
  o.topo.ap_of_user.assign(U, 0);
  o.topo.user_kind.assign(U, UserKind::IoT);
  o.topo.user_kind[0] = UserKind::SE;
  o.h = {users};
  const int n = static_cast<int>(users[0].size());
  ApPlan ap;
  ap.v = CMat::Identity(n, 1);
  ap.w = CMat::Ones(1, 1);
  ap.beams = {ap.v * ap.w.col(0)};
  std::vector<int> c(U);
  for (int u = 0; u < U; ++u) c[u] = u;
  ap.clusters = {c};
  o.plan.aps = {ap};
  o.plan.cluster_of.assign(U, 0);
  o.plan.is_head.assign(U, 0);
  o.plan.is_head[0] = 1;
  for (int u = 0; u < U; ++u) {
    o.plan.position.push_back(u + 1);
    o.plan.own_gain.push_back(std::norm((users[u] * ap.beams[0])(0)));
  }
  return o;
}

TEST(Sic, IdenticalChannelsHoldWithEquality) {
  Rng rng(9);
  const CRow h = random_row(3, rng);
  const auto o = one_cluster({h, h});
  const auto r = sinr_all(o.h, o.plan, {0.3, 0.6}, 1e-3, o.topo);
  EXPECT_EQ(r.sic_fail[1], 0);
  EXPECT_EQ(r.sic_fail[0], 0);
}

TEST(Sic, ZeroHeadChannelFailsEveryPoweredIotUser) {
  Rng rng(10);
  const auto o = one_cluster({CRow::Zero(3), random_row(3, rng), random_row(3, rng), random_row(3, rng)});
  const auto r = sinr_all(o.h, o.plan, {0.2, 0.3, 0.0, 0.1}, 1e-3, o.topo);
  EXPECT_EQ(r.sic_fail[1], 1);
  EXPECT_EQ(r.sic_fail[2], 0);  // zero power gives zero SINR at both ends
  EXPECT_EQ(r.sic_fail[3], 1);
  EXPECT_EQ(sic_feasibility(o.h, o.plan, {0.2, 0.3, 0.0, 0.1}, 1e-3, o.topo), r.sic_fail);
}

TEST(Sinr, SingleUserNoInterference) {
  Rng rng(11);
  const auto o = one_cluster({random_row(3, rng)});
  const double g = o.plan.own_gain[0];
  const auto r = sinr_all(o.h, o.plan, {0.7}, 2e-3, o.topo);
  EXPECT_NEAR(r.sinr[0], g * 0.7 / 2e-3, 1e-12 * r.sinr[0]);
}

TEST(Sinr, ZeroPowerZeroSinr) {
  Rng rng(12);
  const auto o = one_cluster({random_row(3, rng), random_row(3, rng)});
  const auto r = sinr_all(o.h, o.plan, {0.0, 0.5}, 1e-3, o.topo);
  EXPECT_EQ(r.sinr[0], 0.0);
}

TEST(Sinr, FailedIotUserInterferesWithHead) {
  Rng rng(13);
  const CRow head = random_row(3, rng);
  const auto o = one_cluster({head * 0.1, head});
  const auto r = sinr_all(o.h, o.plan, {0.5, 0.5}, 1e-3, o.topo);
  ASSERT_EQ(r.sic_fail[1], 1);
  const double g1 = o.plan.own_gain[0];
  EXPECT_NEAR(r.sinr[0], g1 * 0.5 / (g1 * 0.5 + 1e-3), 1e-12);
}

NetworkConfig small_network() {
  NetworkConfig c;
  c.num_aps = 2;
  c.num_ris = 1;
  c.se_users_per_ap = 2;
  c.iot_users_per_ap = 3;
  c.antennas = 8;
  c.rf_chains = 2;
  c.ris_elements = 4;
  c.room_x = 10;
  c.room_y = 6;
  return c;
}

TEST(Sinr, MatchesLiteralTranscription) {
  const auto c = small_network();
  Rng rng(14);
  const auto topo = build_topology(c, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<RisAction> ris(c.num_ris, RisAction::all_off(c.ris_elements));
    for (auto& r : ris)
      for (int l = 0; l < c.ris_elements; ++l) {
        r.on_off[l] = unit(rng) < 0.5;
        r.phase_index[l] = unit(rng) < 0.5;
      }
    const auto s = sample_channel_state(topo, ris, c, rng);
    LinkOptions lo;
    lo.heads = trial % 2 ? HeadSelection::Csi : HeadSelection::Qos;
    const auto plan = build_plan(s.effective, topo, c, lo);
    std::vector<double> alpha(topo.num_users());
    for (auto& a : alpha) a = unit(rng) * 0.2;
    const auto got = sinr_all(s.effective, plan, alpha, c.noise_power_w, topo);
    const auto ref = testing::reference_sinr(s.effective, plan, alpha, c.noise_power_w);
    for (int u = 0; u < topo.num_users(); ++u) {
      EXPECT_LE(std::abs(got.sinr[u] - ref.sinr[u]), 1e-12 * std::abs(ref.sinr[u])) << "user " << u;
      EXPECT_EQ(got.sic_fail[u], ref.fail[u]);
    }
  }
}

TEST(Plan, QosHeadsAreSeUsers) {
  const auto c = small_network();
  Rng rng(15);
  const auto topo = build_topology(c, rng);
  std::vector<RisAction> off(c.num_ris, RisAction::all_off(c.ris_elements));
  const auto s = sample_channel_state(topo, off, c, rng);
  const auto plan = build_plan(s.effective, topo, c);
  for (int u = 0; u < topo.num_users(); ++u) {
    EXPECT_EQ(plan.is_head[u] == 1, topo.user_kind[u] == UserKind::SE);
    EXPECT_GE(plan.cluster_of[u], 0);
  }
  for (const auto& ap : plan.aps) {
    EXPECT_EQ(ap.clusters.size(), 2u);
    for (std::size_t n = 0; n < ap.clusters.size(); ++n) {
      const auto& cl = ap.clusters[n];
      EXPECT_LE(static_cast<int>(cl.size()), default_max_cluster_size(c));
      for (std::size_t k = 2; k < cl.size(); ++k) EXPECT_GE(plan.own_gain[cl[k - 1]], plan.own_gain[cl[k]]);
    }
  }
}

TEST(Plan, CsiHeadsAreStrongest) {
  const auto c = small_network();
  Rng rng(16);
  const auto topo = build_topology(c, rng);
  std::vector<RisAction> off(c.num_ris, RisAction::all_off(c.ris_elements));
  const auto s = sample_channel_state(topo, off, c, rng);
  LinkOptions lo;
  lo.heads = HeadSelection::Csi;
  const auto plan = build_plan(s.effective, topo, c, lo);
  const int K = c.users_per_ap();
  for (int m = 0; m < c.num_aps; ++m) {
    double weakest_head = 1e300, strongest_member = 0;
    for (int k = 0; k < K; ++k) {
      const double g = s.effective[m][m * K + k].squaredNorm();
      if (plan.is_head[m * K + k]) weakest_head = std::min(weakest_head, g);
      else strongest_member = std::max(strongest_member, g);
    }
    EXPECT_GE(weakest_head, strongest_member);
  }
}

TEST(Rates, Values) {
  const auto r = rates({0.0, 1.0, 3.0}, 10e9);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_DOUBLE_EQ(r[1], 10e9);
  EXPECT_DOUBLE_EQ(r[2], 20e9);
  EXPECT_THROW(rates({-1.0}, 1.0), InvalidArgument);
}

TEST(Power, CircuitOnly) {
  NetworkConfig c;
  const std::vector<double> alpha(c.total_users(), 0.0);
  std::vector<RisAction> off(c.num_ris, RisAction::all_off(c.ris_elements));
  const double expect = c.total_users() * c.p_device_w + c.num_aps * c.ap_circuit_power();
  EXPECT_DOUBLE_EQ(power_consumption(alpha, off, c), expect);
  auto on = off;
  on[0].on_off.assign(c.ris_elements, 1);
  std::vector<double> a2 = alpha;
  a2[0] = 0.4;
  EXPECT_NEAR(power_consumption(a2, on, c), expect + c.pa_inefficiency * 0.4 + c.ris_elements * c.p_ris_element_w,
              1e-12);
}

TEST(EnergyEfficiency, Values) {
  EXPECT_EQ(energy_efficiency({0.0, 0.0}, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(energy_efficiency({2e9, 4e9}, 3.0), 2e9);
  EXPECT_THROW(energy_efficiency({1.0}, 0.0), InvalidArgument);
}

}  // namespace
}  // namespace rismarl
