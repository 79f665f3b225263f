// SPDX-License-Identifier: Apache-2.0
#include "rismarl/phy/channel.hpp"

#include <algorithm>
#include <cmath>

namespace rismarl {

namespace {

double departure_angle(const Point3& from, const Point3& to) {
  const double d = distance(from, to);
  if (d == 0.0) return 0.0;
  return std::asin(std::clamp((to[0] - from[0]) / d, -1.0, 1.0));
}

std::vector<double> draw_phases(int count, Rng& rng) {
  std::uniform_real_distribution<double> ph(0.0, 2.0 * kPi);
  std::vector<double> out(count);
  for (auto& p : out) p = ph(rng);
  return out;
}

}  // namespace

double los_probability(double distance_m, double decay_distance_m) {
  require(distance_m >= 0, "los_probability: negative distance");
  require(decay_distance_m > 0, "los_probability: decay distance must be positive");
  return std::exp(-distance_m / decay_distance_m);
}

double path_loss_db(double freq_hz, double distance_m, double absorption_coeff) {
  require(freq_hz > 0, "path_loss_db: frequency must be positive");
  require(distance_m > 0, "path_loss_db: distance must be positive");
  const double spread = 20.0 * std::log10(kSpeedOfLight / (4.0 * kPi * freq_hz * distance_m));
  const double absorb = 10.0 * absorption_coeff * distance_m * std::log10(std::exp(1.0));
  return spread - absorb;
}

CCol array_response(int n, double aod) {
  require(n >= 1, "array_response: n must be >= 1");
  CCol a(n);
  const double s = std::sin(aod), scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int m = 0; m < n; ++m) a(m) = scale * std::polar(1.0, kPi * m * s);
  return a;
}

cdouble reflection_coeff(double incidence, double roughness_sigma_m, double freq_hz, cdouble refractive_index) {
  const double c = std::cos(incidence), s = std::sin(incidence);
  const cdouble root = std::sqrt(refractive_index * refractive_index - s * s);
  const cdouble fresnel = (c - root) / (c + root);
  const double rough = std::exp(-0.5 * (4.0 * kPi * freq_hz * roughness_sigma_m * c / kSpeedOfLight));
  return fresnel * rough;
}

RisAction RisAction::all_off(int elements) {
  return RisAction{std::vector<int>(elements, 0), std::vector<int>(elements, 0)};
}

CCol ris_phase_diagonal(const RisAction& action, int phase_bits) {
  require(action.on_off.size() == action.phase_index.size(), "RisAction: length mismatch");
  require(phase_bits >= 1, "RisAction: phase bits must be >= 1");
  const int levels = 1 << phase_bits;
  const double step = std::ldexp(kPi, 1 - phase_bits);
  CCol d(static_cast<Eigen::Index>(action.on_off.size()));
  for (std::size_t l = 0; l < action.on_off.size(); ++l) {
    const int w = action.on_off[l], b = action.phase_index[l];
    require(w == 0 || w == 1, "RisAction: on_off must be 0 or 1");
    require(b >= 0 && b < levels, "RisAction: phase index out of range");
    d(static_cast<Eigen::Index>(l)) = w ? std::polar(1.0, step * b) : cdouble(0, 0);
  }
  return d;
}

CMat ris_phase_matrix(const RisAction& action, int phase_bits) {
  return ris_phase_diagonal(action, phase_bits).asDiagonal();
}

CRow cascaded_channel(const CRow& direct, const std::vector<RisLinkView>& links) {
  CRow h = direct;
  for (const auto& link : links) {
    const auto L = link.theta->size();
    require(link.f->size() == L && link.g->rows() == L && link.g->cols() == direct.size(),
            "cascaded_channel: dimension mismatch");
    const CRow ft = link.f->cwiseProduct(link.theta->transpose());
    h.noalias() += ft * (*link.g);
  }
  return h;
}

LinkGeometry sample_link_geometry(double distance_m, double los_aod, bool force_los,
                                  const NetworkConfig& config, Rng& rng) {
  LinkGeometry g;
  g.distance = distance_m;
  g.los_aod = los_aod;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  g.los = force_los || unit(rng) < los_probability(distance_m, config.los_decay_distance_m);
  if (force_los) return g;
  std::uniform_real_distribution<double> detour(config.nlos_detour_min, config.nlos_detour_max);
  std::uniform_real_distribution<double> aod(-kPi / 2, kPi / 2);
  std::uniform_real_distribution<double> inc(0.0, kPi / 2);
  const cdouble n_r(config.refractive_index_re, config.refractive_index_im);
  for (int p = 0; p < config.num_nlos_paths; ++p) {
    NlosPath path;
    path.length = distance_m * detour(rng);
    path.aod = aod(rng);
    path.reflection = reflection_coeff(inc(rng), config.roughness_sigma_m, config.carrier_freq_hz, n_r);
    g.nlos.push_back(path);
  }
  return g;
}

CRow compose_link(const LinkGeometry& geom, int n, double amplitude_scale,
                  const std::vector<double>& phases, bool unnormalized, const NetworkConfig& config) {
  require(phases.size() == 1 + geom.nlos.size(), "compose_link: one phase per path required");
  const double arr = unnormalized ? std::sqrt(static_cast<double>(n)) : 1.0;
  const double base = config.path_amplitude_gain() * amplitude_scale * arr;
  CRow h = CRow::Zero(n);
  if (geom.los && geom.distance > 0) {
    const double amp = base * std::sqrt(std::pow(10.0, path_loss_db(config.carrier_freq_hz, geom.distance,
                                                                     config.absorption_coeff) / 10.0));
    h += (amp * std::polar(1.0, phases[0])) * array_response(n, geom.los_aod).adjoint();
  }
  for (std::size_t p = 0; p < geom.nlos.size(); ++p) {
    const auto& path = geom.nlos[p];
    const double amp = base * std::sqrt(std::pow(10.0, path_loss_db(config.carrier_freq_hz, path.length,
                                                                     config.absorption_coeff) / 10.0));
    h += (amp * path.reflection * std::polar(1.0, phases[p + 1])) * array_response(n, path.aod).adjoint();
  }
  return h;
}

DirectChannel direct_channel(const Topology& topology, int user, int ap, Rng& rng, const NetworkConfig& config) {
  require(user >= 0 && user < topology.num_users(), "direct_channel: bad user index");
  require(ap >= 0 && ap < topology.num_aps(), "direct_channel: bad AP index");
  const auto& a = topology.ap_positions[ap];
  const auto& u = topology.user_positions[user];
  const auto geom = sample_link_geometry(distance(a, u), departure_angle(a, u), false, config, rng);
  const auto phases = draw_phases(1 + static_cast<int>(geom.nlos.size()), rng);
  return {compose_link(geom, config.antennas, 1.0, phases, false, config), geom.los};
}

ChannelSampler::ChannelSampler(const NetworkConfig& config, const Topology& topology)
    : config_(config), topology_(topology) {}

void ChannelSampler::resample_geometry(Rng& rng) {
  const int M = topology_.num_aps(), J = topology_.num_ris(), U = topology_.num_users();
  ap_user_.assign(M, std::vector<LinkGeometry>(U));
  ris_user_.assign(J, std::vector<LinkGeometry>(U));
  ap_ris_.assign(M, std::vector<LinkGeometry>(J));
  for (int i = 0; i < M; ++i)
    for (int u = 0; u < U; ++u) {
      const auto& a = topology_.ap_positions[i];
      const auto& p = topology_.user_positions[u];
      ap_user_[i][u] = sample_link_geometry(distance(a, p), departure_angle(a, p), false, config_, rng);
    }
  for (int j = 0; j < J; ++j)
    for (int u = 0; u < U; ++u) {
      const auto& r = topology_.ris_positions[j];
      const auto& p = topology_.user_positions[u];
      ris_user_[j][u] = sample_link_geometry(distance(r, p), departure_angle(r, p), false, config_, rng);
    }
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < J; ++j) {
      const auto& a = topology_.ap_positions[i];
      const auto& r = topology_.ris_positions[j];
      auto g = sample_link_geometry(distance(a, r), departure_angle(a, r), true, config_, rng);
      g.arrival = departure_angle(r, a);
      ap_ris_[i][j] = g;
    }
}

ChannelState ChannelSampler::sample(Rng& rng) const {
  require(!ap_user_.empty(), "ChannelSampler: geometry not sampled");
  const int M = topology_.num_aps(), J = topology_.num_ris(), U = topology_.num_users();
  const int NA = config_.antennas, L = config_.ris_elements;
  const double ris_gain = config_.ris_link_amplitude_gain();
  ChannelState s;
  s.direct.assign(M, std::vector<CRow>(U));
  s.los_ap_user.assign(M, std::vector<std::uint8_t>(U));
  for (int i = 0; i < M; ++i)
    for (int u = 0; u < U; ++u) {
      const auto& g = ap_user_[i][u];
      s.direct[i][u] = compose_link(g, NA, 1.0, draw_phases(1 + static_cast<int>(g.nlos.size()), rng), false, config_);
      s.los_ap_user[i][u] = g.los;
    }
  s.ris_to_user.assign(J, std::vector<CRow>(U));
  s.los_ris_user.assign(J, std::vector<std::uint8_t>(U));
  for (int j = 0; j < J; ++j)
    for (int u = 0; u < U; ++u) {
      const auto& g = ris_user_[j][u];
      s.ris_to_user[j][u] = compose_link(g, L, ris_gain, draw_phases(1 + static_cast<int>(g.nlos.size()), rng), true, config_);
      s.los_ris_user[j][u] = g.los;
    }
  s.ap_to_ris.assign(M, std::vector<CMat>(J));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < J; ++j) {
      const auto& nb = topology_.ap_ris_neighbors[i];
      const double phase = draw_phases(1, rng)[0];
      if (std::find(nb.begin(), nb.end(), j) == nb.end()) {
        s.ap_to_ris[i][j] = CMat::Zero(L, NA);
        continue;
      }
      const auto& g = ap_ris_[i][j];
      const double amp = config_.path_amplitude_gain() * ris_gain *
                         std::sqrt(std::pow(10.0, path_loss_db(config_.carrier_freq_hz, g.distance,
                                                               config_.absorption_coeff) / 10.0));
      const CCol rx = array_response(L, g.arrival) * std::sqrt(static_cast<double>(L));
      const CCol tx = array_response(NA, g.los_aod);
      s.ap_to_ris[i][j] = (amp * std::polar(1.0, phase)) * rx * tx.adjoint();
    }
  return s;
}

EffectiveChannels effective_channels(const ChannelState& state, const std::vector<RisAction>& actions,
                                     const Topology& topology, const NetworkConfig& config) {
  const int M = topology.num_aps(), U = topology.num_users();
  require(static_cast<int>(actions.size()) == topology.num_ris(), "effective_channels: one action per RIS");
  std::vector<CCol> theta;
  theta.reserve(actions.size());
  for (const auto& a : actions) {
    require(static_cast<int>(a.on_off.size()) == config.ris_elements, "effective_channels: action length");
    theta.push_back(ris_phase_diagonal(a, config.ris_phase_bits));
  }
  EffectiveChannels h(M, std::vector<CRow>(U));
  for (int i = 0; i < M; ++i) {
    for (int u = 0; u < U; ++u) {
      std::vector<RisLinkView> links;
      for (int j : topology.ap_ris_neighbors[i])
        if (!theta[j].isZero(0.0)) links.push_back({&state.ris_to_user[j][u], &theta[j], &state.ap_to_ris[i][j]});
      h[i][u] = cascaded_channel(state.direct[i][u], links);
    }
  }
  return h;
}

SampledChannels sample_channel_state(const Topology& topology, const std::vector<RisAction>& actions,
                                     const NetworkConfig& config, Rng& rng) {
  ChannelSampler sampler(config, topology);
  sampler.resample_geometry(rng);
  SampledChannels out;
  out.state = sampler.sample(rng);
  out.effective = effective_channels(out.state, actions, topology, config);
  return out;
}

}  // namespace rismarl
