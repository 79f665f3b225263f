// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rismarl/ad/layers.hpp"
#include "rismarl/env/environment.hpp"

namespace rismarl {

/// What neighbors send each other before acting.
enum class Exchange {
  Embedded,  // MPGNN messages
  None,      // nothing; aggregation sees an empty set
  Raw,       // unembedded edge features
};

enum class Variant { GeVdac, Vdac, IeVdac, Central };

Variant parse_variant(const std::string& name);
std::string variant_name(Variant v);
Exchange variant_exchange(Variant v);

/// Shapes taken from an environment.
struct PolicyDims {
  int num_aps = 0;
  int num_ris = 0;
  int users_per_ap = 0;
  int ris_elements = 0;
  int phase_levels = 2;
  double max_power_w = 1.0;
  std::array<int, kNumNodeTypes> node_dim{};
  std::array<int, kNumEdgeTypes> edge_dim{};
  std::array<int, kNumNodeTypes> obs_dim{};
  int digest_dim = 0;

  static PolicyDims from_env(const Environment& env);
  int num_agents() const { return num_aps + num_ris; }
};

struct PolicyConfig {
  Variant variant = Variant::GeVdac;
  int embed_dim = 16;
  int embed_layers = 2;
  ad::Aggregation aggregation = ad::Aggregation::Mean;
  int hidden = 32;          // pre-GRU dense and GRU size
  int mixer_hidden = 32;
  int central_hidden = 64;
  double log_std_init = -0.5;
  double log_std_min = -4.0;
  double log_std_max = 1.0;
};

/// MPGNN over the typed agent graph. Output per node is [o_i, z_i^(N)] for
/// Embedded and None, [o_i, mean raw inbound feature per inbound edge type] for Raw.
class GraphEmbedder {
 public:
  GraphEmbedder() = default;
  GraphEmbedder(ad::ParamStore& store, const PolicyDims& dims, int embed_dim, int layers, ad::Aggregation agg,
                Exchange exchange);

  std::vector<ad::Var> operator()(ad::Tape& t, const CommGraph& g, const std::vector<Eigen::VectorXd>& obs) const;
  int output_dim(int node_type) const { return out_dim_[node_type]; }
  /// Scalars sent over the graph in one slot.
  double exchange_volume(const CommGraph& g) const;
  Exchange exchange() const { return exchange_; }

 private:
  Exchange exchange_ = Exchange::Embedded;
  int embed_dim_ = 16;
  int layers_ = 0;
  ad::Aggregation agg_ = ad::Aggregation::Mean;
  std::array<int, kNumNodeTypes> node_dim_{};
  std::array<int, kNumEdgeTypes> edge_dim_{};
  std::array<int, kNumNodeTypes> out_dim_{};
  std::vector<std::array<ad::Dense, kNumEdgeTypes>> message_;  // psi per layer
  std::vector<std::array<ad::Dense, kNumNodeTypes>> update_;   // Psi per layer
};

/// Everything the networks read in one slot.
struct StepInput {
  CommGraph graph;
  std::vector<Eigen::VectorXd> obs;     // padded local observation per agent
  Eigen::VectorXd digest;               // mixer state
  std::vector<Eigen::VectorXd> hidden;  // GRU state per agent entering the slot

  static StepInput from_env(const Environment& env, std::vector<Eigen::VectorXd> hidden);
};

/// Distribution parameters and values on a tape for one slot, indexed by graph
/// node. Head entries of the other agent type are left invalid.
struct PolicyForward {
  std::vector<int> type;
  std::vector<ad::Var> hidden_out;
  std::vector<ad::Var> ap_mean;      // K allocation logits, then the total-power logit
  std::vector<ad::Var> ap_log_std;   // clamped
  std::vector<ad::Var> ris_onoff;    // L Bernoulli logits
  std::vector<ad::Var> ris_phase;    // L groups of `levels` categorical logits
  std::vector<ad::Var> local_values; // empty for the central critic
  ad::Var v_tot;
};

/// Raw sample of every head, indexed like PolicyForward.
struct SampledAction {
  std::vector<Eigen::MatrixXd> ap_x;  // K + 1 pre-projection Gaussian draws
  std::vector<Eigen::VectorXi> ris_on;
  std::vector<Eigen::VectorXi> ris_phase;
};

/// Actors, local critics and mixer (or the single central critic).
/// Agents of one type share all actor and critic weights.
class Policy {
 public:
  Policy(const PolicyDims& dims, const PolicyConfig& cfg, std::uint64_t seed);

  PolicyForward forward(ad::Tape& t, const StepInput& in) const;
  /// Draws from the heads; greedy takes the means, the positive logits and the argmax phases.
  SampledAction sample(const ad::Tape& t, const PolicyForward& f, Rng& rng, bool greedy) const;
  /// Joint log-probability of a sample (sum over agents and components).
  ad::Var log_prob(ad::Tape& t, const PolicyForward& f, const SampledAction& a) const;
  JointAction to_joint_action(const SampledAction& a) const;

  std::vector<Eigen::VectorXd> initial_hidden() const;
  double exchange_volume(const CommGraph& g) const { return embedder_.exchange_volume(g); }

  ad::ParamStore& theta() { return theta_; }
  const ad::ParamStore& theta() const { return theta_; }
  ad::ParamStore& mu() { return mu_; }
  const ad::ParamStore& mu() const { return mu_; }
  const PolicyDims& dims() const { return dims_; }
  const PolicyConfig& config() const { return cfg_; }
  const GraphEmbedder& embedder() const { return embedder_; }
  const ad::HyperMixer& mixer() const { return mixer_; }

 private:
  PolicyDims dims_;
  PolicyConfig cfg_;
  ad::ParamStore theta_;
  ad::ParamStore mu_;
  GraphEmbedder embedder_;
  std::array<ad::Dense, kNumNodeTypes> trunk_;
  std::array<ad::Gru, kNumNodeTypes> gru_;
  std::array<ad::Dense, kNumNodeTypes> value_head_;
  ad::Dense ap_head_;
  ad::Parameter* ap_log_std_ = nullptr;
  ad::Dense ris_onoff_head_;
  ad::Dense ris_phase_head_;
  ad::HyperMixer mixer_;
  ad::Dense central1_, central2_;
};

}  // namespace rismarl
