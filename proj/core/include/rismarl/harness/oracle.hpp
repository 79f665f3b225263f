// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rismarl/env/environment.hpp"
#include "rismarl/learn/trainer.hpp"

namespace rismarl {

/// Channels and queues that fully determine a one-slot evaluation.
struct EnvSnapshot {
  ChannelState channels;
  QueueState queues;
};

EnvSnapshot snapshot(const Environment& env);
void restore(Environment& env, const EnvSnapshot& s);

/// Fractions of P_max offered to each user; an AP's combination is scaled onto the budget.
std::vector<double> default_power_levels();

/// Size of the discretized joint action space, saturating at UINT64_MAX.
std::uint64_t joint_action_space_size(const NetworkConfig& net, std::size_t power_levels);

/// Every discretized joint action. Throws InvalidArgument with the size when it exceeds `limit`.
std::vector<JointAction> enumerate_joint_actions(const Environment& env, const std::vector<double>& levels,
                                                 std::uint64_t limit = 1000000);

struct OracleResult {
  std::vector<double> best_reward;     // per state
  std::vector<std::size_t> best_index; // into the enumerated action list
  std::vector<JointAction> actions;
  double mean_best = 0;
};

/// Brute-force best one-slot reward at each state.
OracleResult exhaustive_oracle(const Environment& env, const std::vector<EnvSnapshot>& states,
                               const std::vector<double>& levels = default_power_levels(),
                               std::uint64_t limit = 1000000, const StepOptions& options = {});

/// States visited by a greedy policy rollout and the policy's one-slot reward at each.
struct PolicyStates {
  std::vector<EnvSnapshot> states;
  std::vector<double> rewards;
};

PolicyStates greedy_policy_states(Trainer& trainer, Environment& env, int episodes);

/// Network and traffic of the smallest oracle-checkable case: one AP with one SE
/// and one IoT user, four antennas, one RF chain, one 2-element 1-bit RIS.
NetworkConfig tiny_network();
EnvConfig tiny_env();

}  // namespace rismarl
