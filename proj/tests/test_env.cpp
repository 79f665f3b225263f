// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "rismarl/env/comm_graph.hpp"
#include "rismarl/env/environment.hpp"
#include "rismarl/env/metrics_log.hpp"
#include "rismarl/env/queues.hpp"

namespace rismarl {
namespace {

NetworkConfig small_network() {
  NetworkConfig c;
  c.num_aps = 2;
  c.num_ris = 2;
  c.se_users_per_ap = 2;
  c.iot_users_per_ap = 2;
  c.antennas = 8;
  c.rf_chains = 2;
  c.ris_elements = 4;
  c.room_x = 10;
  c.room_y = 6;
  return c;
}

EnvConfig short_env() {
  EnvConfig e;
  e.episode_length = 5;
  return e;
}

JointAction uniform_action(const Environment& env, double fraction, int on) {
  const auto& n = env.net();
  JointAction a;
  a.power.assign(n.num_aps, std::vector<double>(n.users_per_ap(), fraction * n.max_tx_power_w / n.users_per_ap()));
  a.ris.assign(n.num_ris, RisAction{std::vector<int>(n.ris_elements, on), std::vector<int>(n.ris_elements, 0)});
  return a;
}

TEST(Queue, Update) {
  EXPECT_EQ(update_queue(5, 2, 1), 4);
  EXPECT_EQ(update_queue(3, 7, 2), 2);
  EXPECT_EQ(update_queue(6, 0, 0), 6);
  EXPECT_THROW(update_queue(-1, 0, 0), InvalidArgument);
}

TEST(VirtualQueue, Update) {
  EXPECT_DOUBLE_EQ(update_virtual_queue(0, 4, 25, 0.1), 1.5);
  EXPECT_EQ(update_virtual_queue(0, 2, 25, 0.1), 0.0);
  EXPECT_DOUBLE_EQ(update_virtual_queue(3, 1, 10, 0.1), 3.0);
}

TEST(Drift, ZeroState) {
  const auto d = drift_terms(0, 0, 0, 5, 7, 10, 0.1);
  EXPECT_EQ(d.lambda, 0.0);
  EXPECT_EQ(d.b, 0.0);
  EXPECT_GT(d.c, 0.0);
}

TEST(Drift, HandValues) {
  const auto d = drift_terms(2, 3, 1, 5, 7, 10, 0.1);
  EXPECT_DOUBLE_EQ(d.c, 2 * (12.5 + 24.5) + 0.5);
  EXPECT_DOUBLE_EQ(d.b, 0.5 * 4 + 3 * (1 + 2));
  EXPECT_DOUBLE_EQ(d.lambda, 7);
  EXPECT_DOUBLE_EQ(lyapunov(3, 4), 12.5);
}

TEST(RateViolation, Values) {
  EXPECT_EQ(rate_violation({3, 4}, {2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(rate_violation({1.5, 4}, {2, 2}), 0.5);
  EXPECT_THROW(rate_violation({1}, {1, 2}), InvalidArgument);
}

TEST(Reward, Values) {
  EXPECT_DOUBLE_EQ(reward(3.0, 0.0, {0, 0}, {5, 6}, 2.0, 10.0), 6.0);
  EXPECT_DOUBLE_EQ(reward(3.0, 0.5, {1, 2}, {5, 6}, 2.0, 10.0), 6.0 - 5.0 + 17.0);
}

TEST(Outage, ConstantBacklogs) {
  const std::vector<std::vector<double>> below(10, {3.0});
  auto s = outage_stats(below, {5.0});
  EXPECT_EQ(s.empirical[0], 0.0);
  EXPECT_DOUBLE_EQ(s.markov_bound[0], 0.6);
  const std::vector<std::vector<double>> at(10, {5.0});
  s = outage_stats(at, {5.0});
  EXPECT_EQ(s.empirical[0], 1.0);
  EXPECT_GE(s.markov_bound[0], 1.0);
  EXPECT_THROW(outage_stats({}, {1.0}), InvalidArgument);
}

TEST(Environment, IdenticalSeedsIdenticalOutcomes) {
  Environment a(small_network(), short_env(), 17), b(small_network(), short_env(), 17);
  a.reset(3);
  b.reset(3);
  for (int t = 0; t < 5; ++t) {
    const auto act = uniform_action(a, 0.8, t % 2);
    const auto x = a.step(act), y = b.step(act);
    EXPECT_EQ(x.reward, y.reward);
    EXPECT_EQ(x.rates_gbps, y.rates_gbps);
    EXPECT_EQ(x.q, y.q);
    EXPECT_EQ(x.y, y.y);
  }
  EXPECT_TRUE(a.done());
  EXPECT_THROW(a.step(uniform_action(a, 0.5, 0)), InvalidArgument);
}

TEST(Environment, EpisodesDiffer) {
  Environment a(small_network(), short_env(), 17);
  a.reset(0);
  const auto h0 = a.channels().direct[0][0];
  a.reset(1);
  EXPECT_NE(h0, a.channels().direct[0][0]);
  a.reset(0);
  EXPECT_EQ(h0, a.channels().direct[0][0]);
}

TEST(Environment, SilentNetworkEarnsOnlyPenalty) {
  Environment env(small_network(), short_env(), 5);
  const auto out = env.evaluate(uniform_action(env, 0.0, 0));
  double minima = 0;
  for (double r : env.rate_min_gbps()) minima += r;
  for (double r : out.rates_gbps) EXPECT_EQ(r, 0.0);
  EXPECT_EQ(out.eta, 0.0);
  EXPECT_DOUBLE_EQ(out.delta, minima);
  EXPECT_DOUBLE_EQ(out.reward, -env.env().penalty_xi * minima);
  const auto& n = env.net();
  EXPECT_DOUBLE_EQ(out.power_w, n.total_users() * n.p_device_w + n.num_aps * n.ap_circuit_power());
}

TEST(Environment, EvaluateLeavesStateAlone) {
  Environment env(small_network(), short_env(), 5);
  const auto h = env.channels().direct[1][2];
  const auto a = env.evaluate(uniform_action(env, 1.0, 1));
  const auto b = env.evaluate(uniform_action(env, 1.0, 1));
  EXPECT_EQ(a.reward, b.reward);
  EXPECT_EQ(env.time(), 0);
  EXPECT_EQ(env.channels().direct[1][2], h);
}

TEST(Environment, QueuesFollowArrivalsAndRates) {
  Environment env(small_network(), short_env(), 23);
  const auto before = env.queues();
  const auto out = env.step(uniform_action(env, 1.0, 1));
  const auto qmax = env.queue_max();
  for (std::size_t u = 0; u < out.q.size(); ++u) {
    EXPECT_DOUBLE_EQ(out.q[u], update_queue(before.q[u], out.rates_gbps[u], out.arrivals[u]));
    EXPECT_DOUBLE_EQ(out.y[u], update_virtual_queue(before.y[u], out.q[u], qmax[u], env.env().outage_eps));
    EXPECT_LE(out.arrivals[u], env.arrival_cap(static_cast<int>(u)));
    EXPECT_EQ(out.outage[u], out.q[u] >= qmax[u]);
  }
}

TEST(Environment, RewardUsesWeightsAtSlotStart) {
  Environment env(small_network(), short_env(), 29);
  QueueState qs = env.queues();
  for (std::size_t u = 0; u < qs.q.size(); ++u) {
    qs.q[u] = 1.0 + u;
    qs.y[u] = 0.5 * u;
  }
  env.set_queues(qs);
  const auto out = env.evaluate(uniform_action(env, 1.0, 1));
  for (std::size_t u = 0; u < qs.q.size(); ++u) EXPECT_DOUBLE_EQ(out.lambda[u], qs.y[u] + 2 * qs.q[u]);
  EXPECT_DOUBLE_EQ(out.reward, reward(out.eta, out.delta, out.lambda, out.rates_gbps, env.env().zeta,
                                      env.env().penalty_xi));
}

TEST(Environment, MalformedActionsRejected) {
  Environment env(small_network(), short_env(), 5);
  auto a = uniform_action(env, 1.0, 0);
  a.power.pop_back();
  EXPECT_THROW(env.evaluate(a), InvalidArgument);
  a = uniform_action(env, 1.0, 0);
  a.power[0][0] = 2.0;
  EXPECT_THROW(env.evaluate(a), InvalidArgument);
  a = uniform_action(env, 1.0, 0);
  a.ris[0].on_off.pop_back();
  EXPECT_THROW(env.evaluate(a), InvalidArgument);
}

TEST(Environment, ProjectOntoBudget) {
  Environment env(small_network(), short_env(), 5);
  auto a = uniform_action(env, 1.0, 0);
  a.power[0] = {-1.0, 2.0, 1.0, 1.0};
  const auto p = env.project(a);
  EXPECT_EQ(p.power[0][0], 0.0);
  EXPECT_NEAR(p.power[0][1] + p.power[0][2] + p.power[0][3], env.net().max_tx_power_w, 1e-15);
  EXPECT_NO_THROW(env.check_action(p));
}

TEST(Observation, ApWithoutNeighborsSeesOwnBlockOnly) {
  auto n = small_network();
  n.neighbor_distance = 0.0;
  Environment env(n, short_env(), 5);
  const auto o = env.observe(0);
  EXPECT_EQ(o.block_names, (std::vector<std::string>{"direct/0", "lambda", "last_action"}));
  EXPECT_EQ(o.values.size(), 2 * n.users_per_ap() * n.antennas + 2 * n.users_per_ap());
  const auto r = env.observe(n.num_aps);
  EXPECT_EQ(r.block_names, std::vector<std::string>{"last_action"});
}

TEST(Observation, PaddedDimsFixedPerType) {
  for (double reach : {0.0, 6.0, 100.0}) {
    auto n = small_network();
    n.neighbor_distance = reach;
    Environment env(n, short_env(), 5);
    const int K = n.users_per_ap(), NA = n.antennas, L = n.ris_elements, M = n.num_aps;
    EXPECT_EQ(env.padded_observation_dim(AgentType::Ap), M * 2 * K * NA + 2 * K);
    EXPECT_EQ(env.padded_observation_dim(AgentType::Ris), M * (2 * K * L + 2 * L * NA) + 2 * L);
    for (int i = 0; i < env.num_agents(); ++i)
      EXPECT_EQ(env.padded_observation(i).size(), env.padded_observation_dim(env.agent_type(i)));
  }
}

TEST(Observation, LastActionRecorded) {
  Environment env(small_network(), short_env(), 5);
  auto a = uniform_action(env, 0.5, 1);
  a.ris[1].phase_index[2] = 1;
  env.step(a);
  const auto o = env.observe(env.net().num_aps + 1);
  const int L = env.net().ris_elements;
  const auto tail = o.values.tail(2 * L);
  for (int l = 0; l < L; ++l) EXPECT_EQ(tail(l), 1.0);
  EXPECT_EQ(tail(L + 2), 1.0);
  EXPECT_EQ(tail(L), 0.0);
}

TEST(CommGraph, NoRisOnlyApEdges) {
  auto n = small_network();
  n.num_ris = 0;
  Environment env(n, short_env(), 5);
  const auto g = env.comm_graph();
  EXPECT_EQ(g.num_nodes(), 2);
  for (const auto& e : g.edges) EXPECT_EQ(e.type, kApToAp);
  EXPECT_EQ(g.num_edges(), 2);
}

TEST(CommGraph, EdgesMatchNeighborSets) {
  auto n = small_network();
  n.neighbor_distance = 100;
  Environment env(n, short_env(), 5);
  const auto g = env.comm_graph();
  std::array<int, kNumEdgeTypes> count{};
  for (const auto& e : g.edges) ++count[e.type];
  EXPECT_EQ(count[kApToRis], 4);
  EXPECT_EQ(count[kRisToAp], 4);
  EXPECT_EQ(count[kApToAp], 2);
  for (const auto& e : g.edges) EXPECT_EQ(e.feature.size(), g.edge_dim[e.type]);
  for (const auto& v : g.nodes) EXPECT_EQ(v.feature.size(), g.node_dim[v.type]);
}

TEST(CommGraph, PermutedRelabelsEdges) {
  Environment env(small_network(), short_env(), 5);
  const auto g = env.comm_graph();
  std::vector<int> perm{3, 1, 0, 2};
  const auto p = g.permuted(perm);
  ASSERT_EQ(p.num_edges(), g.num_edges());
  for (int i = 0; i < 4; ++i) EXPECT_EQ(p.nodes[i].feature, g.nodes[perm[i]].feature);
  for (int e = 0; e < g.num_edges(); ++e) {
    EXPECT_EQ(perm[p.edges[e].src], g.edges[e].src);
    EXPECT_EQ(perm[p.edges[e].dst], g.edges[e].dst);
  }
  EXPECT_THROW(g.permuted({0, 0, 1, 2}), InvalidArgument);
}

TEST(CommGraph, MismatchedEdgeTypeRejected) {
  CommGraph g;
  g.nodes = {{kApNode, Eigen::VectorXd::Zero(2)}, {kApNode, Eigen::VectorXd::Zero(2)}};
  g.edges = {{0, 1, kApToRis, Eigen::VectorXd::Zero(1)}};
  EXPECT_THROW(g.finalize(), InvalidArgument);
}

TEST(Digest, Shape) {
  Environment env(small_network(), short_env(), 5);
  EXPECT_EQ(env.global_digest().size(), env.global_digest_dim());
  EXPECT_EQ(env.global_digest_dim(), 2 * 8 + 2);
}

TEST(Checksum, TracksConfiguration) {
  Environment a(small_network(), short_env(), 1), b(small_network(), short_env(), 99);
  EXPECT_EQ(a.checksum(), b.checksum());
  auto e = short_env();
  e.zeta = 2;
  Environment c(small_network(), e, 1);
  EXPECT_NE(a.checksum(), c.checksum());
}

TEST(EnvConfig, RoundTrip) {
  EnvConfig e;
  e.zeta = 3.5;
  e.zf_mode = ZfMode::Raw;
  KeyValues kv;
  e.to_key_values(kv);
  const auto f = EnvConfig::from_key_values(kv);
  EXPECT_EQ(f.zeta, 3.5);
  EXPECT_EQ(f.zf_mode, ZfMode::Raw);
  kv.set("outage_eps", "0");
  EXPECT_THROW(EnvConfig::from_key_values(kv), InvalidArgument);
}

TEST(Metrics, AccumulatorReliability) {
  EpisodeAccumulator acc(0, {UserKind::SE, UserKind::IoT});
  StepOutcome s;
  s.reward = 2;
  s.q = {1, 3};
  s.outage = {1, 0};
  acc.add(s, 10);
  s.reward = 4;
  s.outage = {0, 0};
  acc.add(s, 30);
  const auto e = acc.summary();
  EXPECT_EQ(e.steps, 2);
  EXPECT_DOUBLE_EQ(e.mean_reward, 3);
  EXPECT_DOUBLE_EQ(e.se_reliability, 0.5);
  EXPECT_DOUBLE_EQ(e.iot_reliability, 1.0);
  EXPECT_DOUBLE_EQ(e.mean_q, 2.0);
  EXPECT_DOUBLE_EQ(e.exchange_volume, 20);
}

TEST(Metrics, StepRecordFields) {
  StepOutcome s;
  s.t = 4;
  s.reward = 1.5;
  const auto j = step_record_json(2, s, 64);
  for (const char* k : {"\"episode\":2", "\"t\":4", "\"r\":1.5", "\"exchange\":64.0", "\"Y\":"})
    EXPECT_NE(j.find(k), std::string::npos) << k << " in " << j;
}

}  // namespace
}  // namespace rismarl
