// SPDX-License-Identifier: Apache-2.0
// Policy-level helpers shared by the learner tests and the acceptance binary.
#pragma once

#include <algorithm>
#include <cstring>
#include <numeric>

#include "rismarl/env/environment.hpp"
#include "rismarl/learn/policy.hpp"
#include "support.hpp"

namespace rismarl::testing {

inline NetworkConfig small_learner_network() {
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

inline EnvConfig short_episode_env(int length = 4) {
  EnvConfig e;
  e.episode_length = length;
  return e;
}

/// Uniform per-user powers scaled into the budget, random on/off and phase per element.
inline JointAction random_feasible_action(const Environment& env, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& n = env.net();
  JointAction a;
  a.power.assign(n.num_aps, std::vector<double>(n.users_per_ap()));
  for (auto& p : a.power)
    for (auto& v : p) v = unit(rng) * n.max_tx_power_w / n.users_per_ap();
  for (int j = 0; j < n.num_ris; ++j) {
    RisAction r = RisAction::all_off(n.ris_elements);
    for (int l = 0; l < n.ris_elements; ++l) {
      r.on_off[l] = unit(rng) < 0.5;
      r.phase_index[l] = static_cast<int>(unit(rng) * n.phase_levels()) % n.phase_levels();
    }
    a.ris.push_back(r);
  }
  return a;
}

/// Steps the environment a few slots with random feasible actions so queues and
/// last actions are non-trivial, then returns the slot's input with random hidden states.
inline StepInput random_input(Environment& env, const PolicyConfig& cfg, Rng& rng, int warmup = 2) {
  for (int w = 0; w < warmup && !env.done(); ++w) env.step(random_feasible_action(env, rng));
  std::vector<Eigen::VectorXd> hidden;
  for (int i = 0; i < env.num_agents(); ++i) hidden.push_back(random_mat(cfg.hidden, 1, rng, 0.5));
  return StepInput::from_env(env, hidden);
}

inline StepInput permute_input(const StepInput& in, const std::vector<int>& perm) {
  StepInput out;
  out.graph = in.graph.permuted(perm);
  for (int i : perm) {
    out.obs.push_back(in.obs[i]);
    out.hidden.push_back(in.hidden[i]);
  }
  out.digest = in.digest;
  return out;
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

/// Number of actor-logit and local-value entries of the permuted forward pass that
/// differ bitwise from the corresponding entries of the original.
inline long permutation_mismatches(const Policy& policy, const StepInput& in, const std::vector<int>& perm) {
  ad::Tape ta, tb;
  const auto fa = policy.forward(ta, in);
  const auto fb = policy.forward(tb, permute_input(in, perm));
  long bad = 0;
  auto cmp = [&](ad::Var a, ad::Var b) {
    if (a.valid() != b.valid()) {
      ++bad;
      return;
    }
    if (!a.valid()) return;
    const auto& x = ta.value(a);
    const auto& y = tb.value(b);
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
      ++bad;
      return;
    }
    for (Eigen::Index k = 0; k < x.size(); ++k)
      if (std::memcmp(&x.data()[k], &y.data()[k], sizeof(double)) != 0) ++bad;
  };
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int j = perm[i];
    cmp(fa.ap_mean[j], fb.ap_mean[i]);
    cmp(fa.ap_log_std[j], fb.ap_log_std[i]);
    cmp(fa.ris_onoff[j], fb.ris_onoff[i]);
    cmp(fa.ris_phase[j], fb.ris_phase[i]);
    cmp(fa.hidden_out[j], fb.hidden_out[i]);
    if (!fa.local_values.empty()) cmp(fa.local_values[j], fb.local_values[i]);
  }
  return bad;
}

/// A * log pi(a | o) + (V_tot - target)^2 for one slot, built on `t`.
inline ad::Var composition_loss(ad::Tape& t, const Policy& policy, const StepInput& in, const SampledAction& a,
                                double adv, double target) {
  const auto f = policy.forward(t, in);
  ad::Var lp = ad::scale(t, policy.log_prob(t, f, a), adv);
  ad::Var v = ad::square(t, ad::add_scalar(t, f.v_tot, -target));
  return ad::add(t, lp, v);
}

}  // namespace rismarl::testing
