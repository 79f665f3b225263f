// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rismarl/common.hpp"
#include "rismarl/phy/channel.hpp"
#include "rismarl/phy/network_config.hpp"
#include "rismarl/phy/topology.hpp"

namespace rismarl {

/// |h1^H h2| / (|h1| |h2|). Throws on a zero vector.
double channel_correlation(const CRow& h1, const CRow& h2);

/// Cluster membership of one AP's users, by local index (0..K-1).
struct Clustering {
  std::vector<std::vector<int>> members;  // members[n][0] is the head
  std::vector<int> cluster_of;            // -1 for users not passed in
};

/// Heads each open one cluster. Remaining users are assigned by a global greedy
/// pass over (user, cluster) pairs in descending correlation with the head,
/// ties to the lower cluster index, subject to `max_cluster_size` members.
Clustering cluster_users(const std::vector<CRow>& channels, const std::vector<int>& head_ids,
                         const std::vector<int>& member_ids, int max_cluster_size, int rf_chains);

/// Block-diagonal N_A x N_R analog beamformer with B-bit phases, each element
/// quantized against the conjugate phase of the head channel on that antenna.
CMat analog_beamformer(const std::vector<CRow>& head_channels, int n_sub, int phase_bits);

enum class ZfMode { Composed, Raw };

struct ZfResult {
  CMat w;                  // N_R x N_R, column n is w_n
  double condition = 1.0;  // of the Gram matrix that was inverted
  bool regularized = false;
};

/// Zero-forcing on cluster centers. Composed mode inverts on H V; raw mode
/// inverts on H and maps back with V^H. Columns are scaled so |V w_n| = 1.
ZfResult zf_digital_beamformer(const std::vector<CRow>& centers, const CMat& v, ZfMode mode = ZfMode::Composed,
                               double condition_threshold = 1e10);

/// Members sorted by gain descending, ties by user index.
std::vector<int> decoding_order(const std::vector<int>& members, const std::vector<double>& gains);

enum class HeadSelection { Qos, Csi };

struct LinkOptions {
  HeadSelection heads = HeadSelection::Qos;
  ZfMode zf_mode = ZfMode::Composed;
  int max_cluster_size = 0;  // 0 selects ceil(K_U / N_R) + 1
  double condition_threshold = 1e10;
};

/// Per-AP part of the plan.
struct ApPlan {
  std::vector<std::vector<int>> clusters;  // global user ids; [0] head, rest in decoding order
  CMat v;                                  // N_A x N_R
  CMat w;                                  // N_R x N_R
  std::vector<CCol> beams;                 // V w_n
  bool zf_regularized = false;
  double zf_condition = 1.0;
};

/// Clustering, decoding order and beamformers of every AP for one slot.
struct LinkLayerPlan {
  std::vector<ApPlan> aps;
  std::vector<int> cluster_of;     // per global user
  std::vector<int> position;       // 1-based position in its cluster, head = 1
  std::vector<double> own_gain;    // |h^{mm} V^m w_n^m|^2
  std::vector<std::uint8_t> is_head;
};

int default_max_cluster_size(const NetworkConfig& config);

LinkLayerPlan build_plan(const EffectiveChannels& h, const Topology& topology, const NetworkConfig& config,
                         const LinkOptions& options = {});

/// Cluster power p_n^m for every cluster of every AP, from per-user allocations (W).
std::vector<std::vector<double>> cluster_powers(const LinkLayerPlan& plan, const std::vector<double>& alpha);

/// Inter-cluster and inter-AP interference received by each user.
std::vector<double> interference(const EffectiveChannels& h, const LinkLayerPlan& plan,
                                 const std::vector<double>& alpha, const Topology& topology);

/// Per-user SIC failure flag; heads are always 0.
std::vector<std::uint8_t> sic_feasibility(const EffectiveChannels& h, const LinkLayerPlan& plan,
                                          const std::vector<double>& alpha, double noise_power,
                                          const Topology& topology);

struct SinrResult {
  std::vector<double> sinr;
  std::vector<std::uint8_t> sic_fail;
};

SinrResult sinr_all(const EffectiveChannels& h, const LinkLayerPlan& plan, const std::vector<double>& alpha,
                    double noise_power, const Topology& topology);

/// bandwidth * log2(1 + sinr), bit/s.
std::vector<double> rates(const std::vector<double>& sinr, double bandwidth_hz);

/// Transmit, amplifier, device, AP circuit and active RIS element power, W.
double power_consumption(const std::vector<double>& alpha, const std::vector<RisAction>& ris,
                         const NetworkConfig& config);

/// Sum rate over power, bit/J.
double energy_efficiency(const std::vector<double>& rates_bps, double power_w);

}  // namespace rismarl
