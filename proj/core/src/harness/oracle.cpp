// SPDX-License-Identifier: Apache-2.0
#include "rismarl/harness/oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rismarl {

EnvSnapshot snapshot(const Environment& env) { return {env.channels(), env.queues()}; }

void restore(Environment& env, const EnvSnapshot& s) {
  env.set_channels(s.channels);
  env.set_queues(s.queues);
}

std::vector<double> default_power_levels() { return {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}; }

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_pow(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  for (int i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

}  // namespace

std::uint64_t joint_action_space_size(const NetworkConfig& net, std::size_t power_levels) {
  const auto per_ap = sat_pow(power_levels, net.users_per_ap());
  // off once, then on at each phase
  const auto per_element = static_cast<std::uint64_t>(net.phase_levels() + 1);
  return sat_mul(sat_pow(per_ap, net.num_aps), sat_pow(per_element, net.ris_elements * net.num_ris));
}

std::vector<JointAction> enumerate_joint_actions(const Environment& env, const std::vector<double>& levels,
                                                 std::uint64_t limit) {
  const auto& net = env.net();
  require(!levels.empty(), "oracle: at least one power level required");
  const auto size = joint_action_space_size(net, levels.size());
  if (size > limit) {
    std::ostringstream os;
    os << "oracle: joint action space has " << size << " actions, limit is " << limit << " (" << levels.size()
       << "^" << net.users_per_ap() * net.num_aps << " power x " << net.phase_levels() + 1 << "^"
       << net.ris_elements * net.num_ris << " RIS)";
    throw InvalidArgument(os.str());
  }
  const int M = net.num_aps, K = net.users_per_ap(), J = net.num_ris, L = net.ris_elements;
  const int P = static_cast<int>(levels.size()), E = net.phase_levels() + 1;
  const int power_digits = M * K, ris_digits = J * L;
  std::vector<int> digits(power_digits + ris_digits, 0);
  std::vector<JointAction> out;
  out.reserve(static_cast<std::size_t>(size));
  for (std::uint64_t n = 0; n < size; ++n) {
    JointAction a;
    a.power.assign(M, std::vector<double>(K));
    for (int d = 0; d < power_digits; ++d) a.power[d / K][d % K] = levels[digits[d]] * net.max_tx_power_w;
    for (int j = 0; j < J; ++j) {
      RisAction r;
      for (int l = 0; l < L; ++l) {
        const int v = digits[power_digits + j * L + l];
        r.on_off.push_back(v > 0 ? 1 : 0);
        r.phase_index.push_back(v > 0 ? v - 1 : 0);
      }
      a.ris.push_back(std::move(r));
    }
    out.push_back(env.project(std::move(a)));
    for (int d = static_cast<int>(digits.size()) - 1; d >= 0; --d) {
      const int base = d < power_digits ? P : E;
      if (++digits[d] < base) break;
      digits[d] = 0;
    }
  }
  return out;
}

OracleResult exhaustive_oracle(const Environment& env, const std::vector<EnvSnapshot>& states,
                               const std::vector<double>& levels, std::uint64_t limit, const StepOptions& options) {
  OracleResult res;
  res.actions = enumerate_joint_actions(env, levels, limit);
  Environment probe = env;
  for (const auto& s : states) {
    restore(probe, s);
    double best = -std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < res.actions.size(); ++i) {
      const double r = probe.evaluate(res.actions[i], options).reward;
      if (r > best) {
        best = r;
        arg = i;
      }
    }
    res.best_reward.push_back(best);
    res.best_index.push_back(arg);
    res.mean_best += best;
  }
  if (!states.empty()) res.mean_best /= static_cast<double>(states.size());
  return res;
}

PolicyStates greedy_policy_states(Trainer& trainer, Environment& env, int episodes) {
  PolicyStates out;
  auto& policy = trainer.policy();
  for (int e = 0; e < episodes; ++e) {
    env.reset(static_cast<std::uint64_t>(e));
    Rng rng(0);
    auto hidden = policy.initial_hidden();
    while (!env.done()) {
      auto in = StepInput::from_env(env, hidden);
      ad::Tape tape;
      auto f = policy.forward(tape, in);
      const auto action = policy.to_joint_action(policy.sample(tape, f, rng, true));
      for (std::size_t i = 0; i < hidden.size(); ++i) hidden[i] = tape.value(f.hidden_out[i]);
      out.states.push_back(snapshot(env));
      out.rewards.push_back(env.step(action).reward);
    }
  }
  return out;
}

NetworkConfig tiny_network() {
  NetworkConfig n;
  n.num_aps = 1;
  n.num_ris = 1;
  n.se_users_per_ap = 1;
  n.iot_users_per_ap = 1;
  n.antennas = 4;
  n.rf_chains = 1;
  n.ris_elements = 2;
  n.ris_phase_bits = 1;
  n.room_x = 6;
  n.room_y = 6;
  n.neighbor_distance = 12;
  n.validate();
  return n;
}

EnvConfig tiny_env() {
  EnvConfig e;
  e.episode_length = 200;
  e.validate();
  return e;
}

}  // namespace rismarl
