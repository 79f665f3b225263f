// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "rismarl/common.hpp"
#include "rismarl/phy/network_config.hpp"
#include "rismarl/phy/topology.hpp"

namespace rismarl {

/// Probability that the line-of-sight path survives blockage at a given distance.
double los_probability(double distance_m, double decay_distance_m);

/// Spreading plus molecular absorption loss, in dB (negative for a loss).
double path_loss_db(double freq_hz, double distance_m, double absorption_coeff);

/// ULA response, entry m = exp(j pi m sin(phi)) / sqrt(n).
CCol array_response(int n, double aod);

/// Fresnel coefficient times Rayleigh roughness factor for a reflected path.
cdouble reflection_coeff(double incidence, double roughness_sigma_m, double freq_hz, cdouble refractive_index);

/// ON/OFF state and phase index of every element of one RIS.
struct RisAction {
  std::vector<int> on_off;
  std::vector<int> phase_index;

  static RisAction all_off(int elements);
  bool operator==(const RisAction&) const = default;
};

/// Diagonal of the RIS phase-shift matrix; entry l = w_l exp(j 2^(1-b) pi beta_l).
CCol ris_phase_diagonal(const RisAction& action, int phase_bits);
CMat ris_phase_matrix(const RisAction& action, int phase_bits);

struct RisLinkView {
  const CRow* f;         // 1 x L, RIS to user
  const CCol* theta;     // L diagonal of the phase matrix
  const CMat* g;         // L x N_A, AP to RIS
};

/// h + sum_j f_j diag(theta_j) G_j.
CRow cascaded_channel(const CRow& direct, const std::vector<RisLinkView>& links);

/// Geometry of one reflected path, fixed for an episode.
struct NlosPath {
  double length = 0;
  double aod = 0;
  cdouble reflection{0, 0};
};

/// Episode-level description of one transmitter-receiver link.
struct LinkGeometry {
  double distance = 0;
  double los_aod = 0;      // departure angle at the transmitter array
  double arrival = 0;      // arrival angle at a receiving RIS (AP-RIS links only)
  bool los = true;
  std::vector<NlosPath> nlos;
};

/// Draws blockage and reflected-path geometry for a link of the given distance.
LinkGeometry sample_link_geometry(double distance_m, double los_aod, bool force_los,
                                  const NetworkConfig& config, Rng& rng);

/// Composes a 1 x n link row from geometry and per-path phases (1 + n_NL of them).
/// `unnormalized` scales the array response by sqrt(n), used on the RIS side.
CRow compose_link(const LinkGeometry& geom, int n, double amplitude_scale,
                  const std::vector<double>& phases, bool unnormalized, const NetworkConfig& config);

/// One-shot direct AP-user channel: blockage draw, reflected paths and phases from `rng`.
struct DirectChannel {
  CRow h;
  bool los = false;
};
DirectChannel direct_channel(const Topology& topology, int user, int ap, Rng& rng, const NetworkConfig& config);

/// Every complex link matrix of one slot.
struct ChannelState {
  std::vector<std::vector<CRow>> direct;       // [ap][user], 1 x N_A
  std::vector<std::vector<CRow>> ris_to_user;  // [ris][user], 1 x L
  std::vector<std::vector<CMat>> ap_to_ris;    // [ap][ris], L x N_A, zero when not neighbors
  std::vector<std::vector<std::uint8_t>> los_ap_user;
  std::vector<std::vector<std::uint8_t>> los_ris_user;
};

/// Effective channels h[ap][user] composed with the RIS actions.
using EffectiveChannels = std::vector<std::vector<CRow>>;

EffectiveChannels effective_channels(const ChannelState& state, const std::vector<RisAction>& actions,
                                     const Topology& topology, const NetworkConfig& config);

/// Holds episode-level link geometry and draws per-slot channel realizations.
class ChannelSampler {
 public:
  ChannelSampler(const NetworkConfig& config, const Topology& topology);

  /// Blockage flags and reflected-path geometry; called once per episode.
  void resample_geometry(Rng& rng);
  /// Small-scale path phases; called once per slot.
  ChannelState sample(Rng& rng) const;

  const LinkGeometry& ap_user(int ap, int user) const { return ap_user_[ap][user]; }
  const LinkGeometry& ris_user(int ris, int user) const { return ris_user_[ris][user]; }

 private:
  NetworkConfig config_;
  Topology topology_;
  std::vector<std::vector<LinkGeometry>> ap_user_;
  std::vector<std::vector<LinkGeometry>> ris_user_;
  std::vector<std::vector<LinkGeometry>> ap_ris_;
};

struct SampledChannels {
  ChannelState state;
  EffectiveChannels effective;
};

/// Fresh geometry and phases for one slot, composed under the given RIS actions.
SampledChannels sample_channel_state(const Topology& topology, const std::vector<RisAction>& actions,
                                     const NetworkConfig& config, Rng& rng);

}  // namespace rismarl
