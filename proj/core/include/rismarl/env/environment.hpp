// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rismarl/common.hpp"
#include "rismarl/env/comm_graph.hpp"
#include "rismarl/env/queues.hpp"
#include "rismarl/link/link_layer.hpp"
#include "rismarl/phy/channel.hpp"
#include "rismarl/phy/network_config.hpp"
#include "rismarl/phy/topology.hpp"

namespace rismarl {

/// Traffic, QoS and reward parameters.
struct EnvConfig {
  double se_arrival_mean = 10.0;   // Gbps x slot per slot
  double iot_arrival_mean = 0.2;
  double se_queue_max = 25.0;
  double iot_queue_max = 10.0;
  double outage_eps = 0.1;
  double se_rate_min_gbps = 2.0;
  double iot_rate_min_gbps = 0.1;
  double zeta = 1.0;               // weight on energy efficiency (Gbit/J)
  double penalty_xi = 10.0;        // weight on rate violation (Gbps)
  int episode_length = 200;
  double arrival_cap_factor = 5.0; // A_max = factor x mean
  double slot_duration_s = 1e-3;   // only used to report bits per slot
  int max_cluster_size = 0;        // 0 = ceil(K_U / N_R) + 1
  ZfMode zf_mode = ZfMode::Composed;
  double zf_condition_threshold = 1e10;

  void validate() const;
  static EnvConfig from_key_values(const KeyValues& kv);
  void to_key_values(KeyValues& kv) const;
};

/// Per-AP allocations (W, local user order) and per-RIS configuration.
struct JointAction {
  std::vector<std::vector<double>> power;
  std::vector<RisAction> ris;
};

struct StepOptions {
  HeadSelection heads = HeadSelection::Qos;
};

enum class AgentType { Ap = 0, Ris = 1 };

/// Local view of one agent. AP: direct channel blocks to its own and
/// neighboring APs' users, log(1 + Lambda) of its users, last power fractions.
/// RIS: user and AP links for neighboring APs, last on/off and phase.
struct AgentObservation {
  int agent = 0;
  AgentType type = AgentType::Ap;
  Eigen::VectorXd values;
  std::vector<std::string> block_names;
  std::vector<int> block_sizes;
};

struct StepOutcome {
  int t = 0;
  double reward = 0;
  double eta = 0;        // Gbit/J
  double delta = 0;      // Gbps
  double power_w = 0;
  double sum_rate_gbps = 0;
  std::vector<double> rates_gbps;
  std::vector<double> sinr;
  std::vector<double> lambda;      // weights at the start of the slot
  std::vector<double> arrivals;
  std::vector<double> q;           // after the update
  std::vector<double> y;
  std::vector<std::uint8_t> outage;
  std::vector<std::uint8_t> sic_fail;
  std::vector<std::uint8_t> is_head;
  bool zf_regularized = false;
};

/// Multi-AP, multi-RIS network as a Dec-POMDP. Agents 0..M-1 are APs,
/// M..M+J-1 are RIS controllers.
class Environment {
 public:
  Environment(const NetworkConfig& net, const EnvConfig& env, std::uint64_t seed);

  /// Zero queues, fresh link geometry and first-slot channels for an episode.
  void reset(std::uint64_t episode);
  /// Applies a joint action and advances one slot.
  StepOutcome step(const JointAction& action, const StepOptions& options = {});
  /// One-slot reward and link metrics for an action without changing any state.
  StepOutcome evaluate(const JointAction& action, const StepOptions& options = {}) const;

  /// Clamps negatives and scales each AP's allocation onto sum <= P_max.
  JointAction project(JointAction action) const;
  void check_action(const JointAction& action) const;

  int num_agents() const { return topology_.num_aps() + topology_.num_ris(); }
  AgentType agent_type(int agent) const;
  AgentObservation observe(int agent) const;
  /// Observation zero-padded to a per-type size independent of neighbor counts.
  Eigen::VectorXd padded_observation(int agent) const;
  int padded_observation_dim(AgentType type) const;
  CommGraph comm_graph() const;
  /// Mixer input: log(1 + Lambda), log own-channel gain per user, RIS on fraction.
  Eigen::VectorXd global_digest() const;
  int global_digest_dim() const;

  const NetworkConfig& net() const { return net_; }
  const EnvConfig& env() const { return env_; }
  const Topology& topology() const { return topology_; }
  const ChannelState& channels() const { return channels_; }
  const QueueState& queues() const { return queues_; }
  const JointAction& last_action() const { return last_action_; }
  int time() const { return t_; }
  bool done() const { return t_ >= env_.episode_length; }

  std::vector<double> queue_max() const;
  std::vector<double> rate_min_gbps() const;
  double arrival_cap(int user) const;
  double rate_cap_gbps() const;
  /// Hash of every configuration value and the topology.
  std::uint64_t checksum() const;

  /// Replace the current slot's channels (tests and oracle replays).
  void set_channels(const ChannelState& channels) { channels_ = channels; }
  void set_queues(const QueueState& queues);

 private:
  double channel_scale_direct() const;
  double channel_scale_f() const;
  double channel_scale_g() const;
  Eigen::VectorXd direct_block(int ap, int target_ap) const;
  Eigen::VectorXd f_block(int ris, int ap) const;
  Eigen::VectorXd g_block(int ap, int ris) const;
  Eigen::VectorXd tau(int agent) const;
  std::vector<double> lambda() const;

  NetworkConfig net_;
  EnvConfig env_;
  std::uint64_t seed_;
  Topology topology_;
  ChannelSampler sampler_;
  Rng rng_;
  ChannelState channels_;
  QueueState queues_;
  JointAction last_action_;
  int t_ = 0;
};

}  // namespace rismarl
