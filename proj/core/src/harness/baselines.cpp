// SPDX-License-Identifier: Apache-2.0
#include "rismarl/harness/baselines.hpp"

namespace rismarl {

NoRisKind parse_no_ris_kind(const std::string& name) {
  if (name == "csi") return NoRisKind::Csi;
  if (name == "qos") return NoRisKind::Qos;
  throw InvalidArgument("no-RIS clustering must be csi or qos, got " + name);
}

JointAction equal_power_no_ris(const Environment& env) {
  const auto& net = env.net();
  JointAction a;
  const int K = net.users_per_ap();
  a.power.assign(net.num_aps, std::vector<double>(K, net.max_tx_power_w / K));
  for (int j = 0; j < net.num_ris; ++j) a.ris.push_back(RisAction::all_off(net.ris_elements));
  return a;
}

StepOptions no_ris_options(NoRisKind kind) {
  StepOptions o;
  o.heads = kind == NoRisKind::Csi ? HeadSelection::Csi : HeadSelection::Qos;
  return o;
}

namespace {

EpisodeSummary play(Environment& env, std::uint64_t episode, int index, const StepOptions& opts, LineWriter* steps) {
  env.reset(episode);
  EpisodeAccumulator acc(index, env.topology().user_kind);
  const auto action = equal_power_no_ris(env);
  while (!env.done()) {
    const auto out = env.step(action, opts);
    if (steps && steps->enabled()) steps->write(step_record_json(index, out, 0.0));
    acc.add(out, 0.0);
  }
  return acc.summary();
}

}  // namespace

std::vector<CurveRow> run_no_ris_benchmark(const NetworkConfig& net, const EnvConfig& env, NoRisKind kind,
                                           int episodes, int eval_episodes, std::uint64_t seed,
                                           const TrainerSinks& sinks) {
  require(episodes >= 0 && eval_episodes >= 1, "no-RIS benchmark: bad episode counts");
  const auto opts = no_ris_options(kind);
  Environment train_env(net, env, derive_seed(seed, "env/train"));
  Environment test_env(net, env, derive_seed(seed, "env/test"));
  EpisodeAccumulator test_acc(0, test_env.topology().user_kind);
  for (int k = 0; k < eval_episodes; ++k) {
    test_env.reset(static_cast<std::uint64_t>(k));
    while (!test_env.done()) test_acc.add(test_env.step(equal_power_no_ris(test_env), opts), 0.0);
  }
  const auto test = test_acc.summary();
  if (sinks.curve && sinks.curve->enabled()) sinks.curve->write(CurveRow::csv_header());
  if (sinks.episodes && sinks.episodes->enabled()) sinks.episodes->write(EpisodeSummary::csv_header());
  std::vector<CurveRow> curve;
  for (int e = 0; e < episodes; ++e) {
    const auto s = play(train_env, static_cast<std::uint64_t>(e), e, opts, sinks.steps);
    CurveRow row;
    row.episode = e;
    row.train_reward = s.mean_reward;
    row.test_reward = test.mean_reward;
    row.test_eta = test.mean_eta;
    row.test_se_reliability = test.se_reliability;
    row.test_iot_reliability = test.iot_reliability;
    row.test_mean_q = test.mean_q;
    if (sinks.curve && sinks.curve->enabled()) sinks.curve->write(row.csv_row());
    if (sinks.episodes && sinks.episodes->enabled()) sinks.episodes->write(s.csv_row());
    curve.push_back(row);
  }
  return curve;
}

}  // namespace rismarl
