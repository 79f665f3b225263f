// SPDX-License-Identifier: Apache-2.0
#include "rismarl/learn/trainer.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "rismarl/ad/checkpoint.hpp"
#include "rismarl/learn/returns.hpp"

namespace rismarl {

void LearnerConfig::validate() const {
  require(episodes >= 0, "episodes must be non-negative");
  require(n_step >= 1, "n_step must be at least 1");
  require(gamma >= 0 && gamma < 1, "gamma must lie in [0, 1)");
  require(kappa_pi >= 0 && kappa_v >= 0 && kappa_mu >= 0, "learning rates must be non-negative");
  require(reward_scale > 0, "reward_scale must be positive");
  require(max_grad_norm >= 0, "max_grad_norm must be non-negative");
  require(eval_interval >= 1 && eval_episodes >= 1, "evaluation schedule must be positive");
  require(policy.embed_dim >= 1 && policy.embed_layers >= 0 && policy.hidden >= 1, "bad network sizes");
  require(policy.mixer_hidden >= 1 && policy.central_hidden >= 1, "bad critic sizes");
  require(policy.log_std_min < policy.log_std_max, "log_std_min must be below log_std_max");
}

LearnerConfig LearnerConfig::from_key_values(const KeyValues& kv) {
  LearnerConfig c;
  c.policy.embed_dim = static_cast<int>(kv.get_int("embed_dim", c.policy.embed_dim));
  c.policy.embed_layers = static_cast<int>(kv.get_int("embed_layers", c.policy.embed_layers));
  const auto agg = kv.get_string("aggregation", "mean");
  if (agg == "mean")
    c.policy.aggregation = ad::Aggregation::Mean;
  else if (agg == "sum")
    c.policy.aggregation = ad::Aggregation::Sum;
  else if (agg == "max")
    c.policy.aggregation = ad::Aggregation::Max;
  else
    throw InvalidArgument("aggregation must be mean, sum or max");
  c.policy.hidden = static_cast<int>(kv.get_int("hidden", c.policy.hidden));
  c.policy.mixer_hidden = static_cast<int>(kv.get_int("mixer_hidden", c.policy.mixer_hidden));
  c.policy.central_hidden = static_cast<int>(kv.get_int("central_hidden", c.policy.central_hidden));
  c.policy.log_std_init = kv.get_double("log_std_init", c.policy.log_std_init);
  c.policy.log_std_min = kv.get_double("log_std_min", c.policy.log_std_min);
  c.policy.log_std_max = kv.get_double("log_std_max", c.policy.log_std_max);
  c.episodes = static_cast<int>(kv.get_int("episodes", c.episodes));
  c.n_step = static_cast<int>(kv.get_int("n_step", c.n_step));
  c.gamma = kv.get_double("gamma", c.gamma);
  c.kappa_pi = kv.get_double("kappa_pi", c.kappa_pi);
  c.kappa_v = kv.get_double("kappa_v", c.kappa_v);
  c.kappa_mu = kv.get_double("kappa_mu", c.kappa_mu);
  c.reward_scale = kv.get_double("reward_scale", c.reward_scale);
  c.max_grad_norm = kv.get_double("max_grad_norm", c.max_grad_norm);
  c.eval_interval = static_cast<int>(kv.get_int("eval_interval", c.eval_interval));
  c.eval_episodes = static_cast<int>(kv.get_int("eval_episodes", c.eval_episodes));
  c.validate();
  return c;
}

void LearnerConfig::to_key_values(KeyValues& kv) const {
  auto num = [&](const char* k, double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    kv.set(k, os.str());
  };
  num("embed_dim", policy.embed_dim);
  num("embed_layers", policy.embed_layers);
  kv.set("aggregation", policy.aggregation == ad::Aggregation::Mean  ? "mean"
                        : policy.aggregation == ad::Aggregation::Sum ? "sum"
                                                                     : "max");
  num("hidden", policy.hidden);
  num("mixer_hidden", policy.mixer_hidden);
  num("central_hidden", policy.central_hidden);
  num("log_std_init", policy.log_std_init);
  num("log_std_min", policy.log_std_min);
  num("log_std_max", policy.log_std_max);
  num("episodes", episodes);
  num("n_step", n_step);
  num("gamma", gamma);
  num("kappa_pi", kappa_pi);
  num("kappa_v", kappa_v);
  num("kappa_mu", kappa_mu);
  num("reward_scale", reward_scale);
  num("max_grad_norm", max_grad_norm);
  num("eval_interval", eval_interval);
  num("eval_episodes", eval_episodes);
}

std::string CurveRow::csv_header() {
  return "episode,train_reward,test_reward,test_eta,test_se_reliability,test_iot_reliability,test_mean_q,"
         "exchange_volume,grad_norm_pi,grad_norm_v,grad_norm_mu";
}

std::string CurveRow::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(17) << episode << ',' << train_reward << ',' << test_reward << ',' << test_eta << ','
     << test_se_reliability << ',' << test_iot_reliability << ',' << test_mean_q << ',' << exchange_volume << ','
     << grad_norm_pi << ',' << grad_norm_v << ',' << grad_norm_mu;
  return os.str();
}

// ---------------------------------------------------------------------------

Trainer::Trainer(const NetworkConfig& net, const EnvConfig& env, const LearnerConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      seed_(seed),
      train_env_(net, env, derive_seed(seed, "env/train")),
      test_env_(net, env, derive_seed(seed, "env/test")) {
  cfg_.validate();
  train_env_.reset(0);
  policy_ = std::make_unique<Policy>(PolicyDims::from_env(train_env_), cfg_.policy, derive_seed(seed, "policy"));
}

Trajectory Trainer::rollout(Environment& env, std::uint64_t episode, bool greedy, const std::string& tag,
                            LineWriter* steps) {
  return rollout_impl(env, episode, greedy, tag, steps, nullptr);
}

Trajectory Trainer::rollout_impl(Environment& env, std::uint64_t episode, bool greedy, const std::string& tag,
                                 LineWriter* steps, Kept* kept) {
  env.reset(episode);
  Rng rng(derive_seed(seed_, tag + "/" + std::to_string(episode)));
  auto hidden = policy_->initial_hidden();
  Trajectory traj;
  while (!env.done()) {
    Transition tr;
    tr.input = StepInput::from_env(env, hidden);
    auto tape = std::make_unique<ad::Tape>();
    auto f = policy_->forward(*tape, tr.input);
    tr.action = policy_->sample(*tape, f, rng, greedy);
    tr.v_tot = tape->scalar(f.v_tot);
    tr.exchange_volume = policy_->exchange_volume(tr.input.graph);
    tr.outcome = env.step(policy_->to_joint_action(tr.action));
    tr.reward = tr.outcome.reward * cfg_.reward_scale;
    for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] = tape->value(f.hidden_out[i]);
    if (steps && steps->enabled())
      steps->write(step_record_json(static_cast<int>(episode), tr.outcome, tr.exchange_volume));
    if (kept) {
      kept->tapes.push_back(std::move(tape));
      kept->forwards.push_back(std::move(f));
    }
    traj.steps.push_back(std::move(tr));
  }
  ad::Tape tail;
  auto f = policy_->forward(tail, StepInput::from_env(env, hidden));
  traj.bootstrap_value = tail.scalar(f.v_tot);
  return traj;
}

namespace {

void clip(ad::GradBuffer& g, double max_norm) {
  if (max_norm <= 0) return;
  const double n = ad::grad_norm(g);
  if (n > max_norm)
    for (auto& m : g) m *= max_norm / n;
}

}  // namespace

UpdateStats Trainer::train_episode(std::uint64_t episode, LineWriter* steps) {
  Kept kept;
  auto traj = rollout_impl(train_env_, episode, false, "train", steps, &kept);
  const int T = static_cast<int>(traj.steps.size());
  std::vector<double> rewards(T), values(T + 1);
  for (int t = 0; t < T; ++t) {
    rewards[t] = traj.steps[t].reward;
    values[t] = traj.steps[t].v_tot;
  }
  values[T] = traj.bootstrap_value;
  const auto targets = n_step_returns(rewards, values, cfg_.n_step, cfg_.gamma);

  auto& theta = policy_->theta();
  auto& mu = policy_->mu();
  theta.zero_grad();
  mu.zero_grad();
  auto g_pi = ad::zeros_like(theta);
  auto g_v = ad::zeros_like(theta);
  auto g_mu = ad::zeros_like(mu);
  EpisodeAccumulator acc(static_cast<int>(episode), train_env_.topology().user_kind);
  for (int t = 0; t < T; ++t) {
    auto& tape = *kept.tapes[t];
    const auto& f = kept.forwards[t];
    const double A = advantage(rewards[t], values[t], values[t + 1], cfg_.gamma);
    auto lp = policy_->log_prob(tape, f, traj.steps[t].action);
    tape.backward(ad::scale(tape, lp, A));
    ad::accumulate_grads(g_pi, theta);
    theta.zero_grad();
    auto loss = ad::square(tape, ad::add_scalar(tape, f.v_tot, -targets[t]));
    tape.backward(loss);
    ad::accumulate_grads(g_v, theta);
    ad::accumulate_grads(g_mu, mu);
    theta.zero_grad();
    mu.zero_grad();
    kept.tapes[t].reset();
    acc.add(traj.steps[t].outcome, traj.steps[t].exchange_volume);
  }
  last_train_ = acc.summary();
  if (T > 0) {
    for (auto* g : {&g_pi, &g_v, &g_mu})
      for (auto& m : *g) m /= static_cast<double>(T);
  }
  UpdateStats s{ad::grad_norm(g_pi), ad::grad_norm(g_v), ad::grad_norm(g_mu)};
  clip(g_pi, cfg_.max_grad_norm);
  clip(g_v, cfg_.max_grad_norm);
  clip(g_mu, cfg_.max_grad_norm);
  ad::sgd_update(theta, g_pi, cfg_.kappa_pi, g_v, cfg_.kappa_v);
  ad::sgd_descent(mu, g_mu, cfg_.kappa_mu);
  return s;
}

EpisodeSummary Trainer::evaluate(int episode) {
  EpisodeAccumulator acc(episode, test_env_.topology().user_kind);
  for (int k = 0; k < cfg_.eval_episodes; ++k) {
    auto traj = rollout(test_env_, static_cast<std::uint64_t>(k), true, "test");
    for (const auto& tr : traj.steps) acc.add(tr.outcome, tr.exchange_volume);
  }
  return acc.summary();
}

std::vector<CurveRow> Trainer::train(const TrainerSinks& sinks) {
  std::vector<CurveRow> curve;
  EpisodeSummary test{};
  bool have_test = false;
  if (sinks.curve && sinks.curve->enabled()) sinks.curve->write(CurveRow::csv_header());
  if (sinks.episodes && sinks.episodes->enabled()) sinks.episodes->write(EpisodeSummary::csv_header());
  for (int e = 0; e < cfg_.episodes; ++e) {
    UpdateStats s;
    try {
      s = train_episode(static_cast<std::uint64_t>(e), sinks.steps);
    } catch (const std::runtime_error&) {
      if (!sinks.divergence_checkpoint.empty()) ad::save_checkpoint(policy_->theta(), sinks.divergence_checkpoint);
      throw;
    }
    if (!have_test || (e + 1) % cfg_.eval_interval == 0 || e + 1 == cfg_.episodes) {
      test = evaluate(e);
      have_test = true;
    }
    CurveRow row;
    row.episode = e;
    row.train_reward = last_train_.mean_reward;
    row.test_reward = test.mean_reward;
    row.test_eta = test.mean_eta;
    row.test_se_reliability = test.se_reliability;
    row.test_iot_reliability = test.iot_reliability;
    row.test_mean_q = test.mean_q;
    row.exchange_volume = last_train_.exchange_volume;
    row.grad_norm_pi = s.grad_norm_pi;
    row.grad_norm_v = s.grad_norm_v;
    row.grad_norm_mu = s.grad_norm_mu;
    if (sinks.curve && sinks.curve->enabled()) sinks.curve->write(row.csv_row());
    if (sinks.episodes && sinks.episodes->enabled()) sinks.episodes->write(last_train_.csv_row());
    curve.push_back(row);
  }
  return curve;
}

}  // namespace rismarl
