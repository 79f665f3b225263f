// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rismarl/ad/param_store.hpp"
#include "rismarl/env/environment.hpp"
#include "rismarl/env/metrics_log.hpp"
#include "rismarl/learn/policy.hpp"

namespace rismarl {

struct LearnerConfig {
  PolicyConfig policy;
  int episodes = 50;
  int n_step = 8;
  double gamma = 0.99;
  double kappa_pi = 3e-4;
  double kappa_v = 1e-3;
  double kappa_mu = 1e-3;
  double reward_scale = 1.0;   // rewards are multiplied by this before any return is formed
  double max_grad_norm = 0.0;  // 0 disables clipping
  int eval_interval = 1;       // greedy test episodes every this many training episodes
  int eval_episodes = 1;

  void validate() const;
  static LearnerConfig from_key_values(const KeyValues& kv);
  void to_key_values(KeyValues& kv) const;
};

/// One slot as seen by the learner.
struct Transition {
  StepInput input;
  SampledAction action;
  StepOutcome outcome;
  double reward = 0;  // scaled
  double v_tot = 0;
  double exchange_volume = 0;
};

struct Trajectory {
  std::vector<Transition> steps;
  double bootstrap_value = 0;  // V_tot of the state after the last slot
};

/// Per-episode learning-curve row.
struct CurveRow {
  int episode = 0;
  double train_reward = 0;
  double test_reward = 0;
  double test_eta = 0;
  double test_se_reliability = 0;
  double test_iot_reliability = 0;
  double test_mean_q = 0;
  double exchange_volume = 0;
  double grad_norm_pi = 0;
  double grad_norm_v = 0;
  double grad_norm_mu = 0;

  static std::string csv_header();
  std::string csv_row() const;
};

struct UpdateStats {
  double grad_norm_pi = 0;
  double grad_norm_v = 0;
  double grad_norm_mu = 0;
};

struct TrainerSinks {
  LineWriter* steps = nullptr;  // JSONL per training slot
  LineWriter* curve = nullptr;  // CSV, header written on the first row
  LineWriter* episodes = nullptr;  // CSV of training-episode summaries
  std::string divergence_checkpoint;  // written before rethrowing a non-finite gradient
};

/// Rollout and actor-critic updates for one learner on one environment.
class Trainer {
 public:
  Trainer(const NetworkConfig& net, const EnvConfig& env, const LearnerConfig& cfg, std::uint64_t seed);

  /// Plays one episode. Sampling draws come from a stream derived from the seed and `tag`.
  Trajectory rollout(Environment& env, std::uint64_t episode, bool greedy, const std::string& tag,
                     LineWriter* steps = nullptr);
  /// Collects one training episode and applies one update from it. Gradients are
  /// averaged over the episode's slots, so the rates are per-slot step sizes.
  UpdateStats train_episode(std::uint64_t episode, LineWriter* steps = nullptr);
  /// Greedy evaluation on the held-out environment stream.
  EpisodeSummary evaluate(int episode);
  std::vector<CurveRow> train(const TrainerSinks& sinks = {});

  Policy& policy() { return *policy_; }
  const Policy& policy() const { return *policy_; }
  Environment& train_env() { return train_env_; }
  Environment& test_env() { return test_env_; }
  const LearnerConfig& config() const { return cfg_; }

 private:
  LearnerConfig cfg_;
  std::uint64_t seed_;
  Environment train_env_;
  Environment test_env_;
  std::unique_ptr<Policy> policy_;
  struct Kept {
    std::vector<std::unique_ptr<ad::Tape>> tapes;
    std::vector<PolicyForward> forwards;
  };
  Trajectory rollout_impl(Environment& env, std::uint64_t episode, bool greedy, const std::string& tag,
                          LineWriter* steps, Kept* kept);

  EpisodeSummary last_train_;
};

}  // namespace rismarl
