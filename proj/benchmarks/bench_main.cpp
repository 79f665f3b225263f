// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "rismarl/env/environment.hpp"
#include "rismarl/harness/baselines.hpp"
#include "rismarl/learn/policy.hpp"
#include "rismarl/link/link_layer.hpp"

namespace {

using namespace rismarl;

NetworkConfig medium() {
  NetworkConfig n;
  n.num_aps = 2;
  n.num_ris = 2;
  n.se_users_per_ap = 4;
  n.iot_users_per_ap = 8;
  n.antennas = 32;
  n.ris_elements = 20;
  return n;
}

void BM_EnvStep(benchmark::State& state) {
  Environment env(medium(), EnvConfig{}, 3);
  env.reset(0);
  const auto a = equal_power_no_ris(env);
  for (auto _ : state) {
    if (env.done()) env.reset(1);
    benchmark::DoNotOptimize(env.step(a));
  }
}
BENCHMARK(BM_EnvStep);

void BM_SinrAll(benchmark::State& state) {
  Environment env(medium(), EnvConfig{}, 3);
  env.reset(0);
  const auto a = equal_power_no_ris(env);
  const auto h = effective_channels(env.channels(), a.ris, env.topology(), env.net());
  const auto plan = build_plan(h, env.topology(), env.net(), LinkOptions{});
  std::vector<double> alpha(env.topology().num_users(), 1.0 / env.net().users_per_ap());
  for (auto _ : state) benchmark::DoNotOptimize(sinr_all(h, plan, alpha, env.net().noise_power_w, env.topology()));
}
BENCHMARK(BM_SinrAll);

void BM_ZfDigital(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<CRow> c(n, CRow(4 * n));
  for (auto& row : c)
    for (auto& x : row) x = cdouble(g(rng), g(rng));
  const CMat v = analog_beamformer(c, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(zf_digital_beamformer(c, v, ZfMode::Composed));
}
BENCHMARK(BM_ZfDigital)->Arg(4)->Arg(8);

void BM_PolicyForwardBackward(benchmark::State& state) {
  Environment env(medium(), EnvConfig{}, 3);
  env.reset(0);
  PolicyConfig pc;
  pc.variant = static_cast<Variant>(state.range(0));
  Policy policy(PolicyDims::from_env(env), pc, 1);
  const auto in = StepInput::from_env(env, policy.initial_hidden());
  Rng rng(2);
  for (auto _ : state) {
    ad::Tape t;
    auto f = policy.forward(t, in);
    auto a = policy.sample(t, f, rng, false);
    t.backward(policy.log_prob(t, f, a));
    policy.theta().zero_grad();
  }
}
BENCHMARK(BM_PolicyForwardBackward)->Arg(0)->Arg(2)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
