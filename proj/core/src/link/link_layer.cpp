// SPDX-License-Identifier: Apache-2.0
#include "rismarl/link/link_layer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace rismarl {

namespace {

double safe_correlation(const CRow& a, const CRow& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

}  // namespace

double channel_correlation(const CRow& h1, const CRow& h2) {
  require(h1.size() == h2.size(), "channel_correlation: size mismatch");
  require(h1.norm() > 0 && h2.norm() > 0, "channel_correlation: zero vector");
  return std::min(1.0, safe_correlation(h1, h2));
}

Clustering cluster_users(const std::vector<CRow>& channels, const std::vector<int>& head_ids,
                         const std::vector<int>& member_ids, int max_cluster_size, int rf_chains) {
  require(static_cast<int>(head_ids.size()) <= rf_chains, "cluster_users: more clusters than RF chains");
  require(max_cluster_size >= 1, "cluster_users: max_cluster_size must be >= 1");
  const int N = static_cast<int>(head_ids.size());
  require(static_cast<long>(N) * max_cluster_size >= static_cast<long>(N + member_ids.size()),
          "cluster_users: not enough cluster capacity");
  Clustering c;
  c.members.assign(N, {});
  c.cluster_of.assign(channels.size(), -1);
  for (int n = 0; n < N; ++n) {
    c.members[n].push_back(head_ids[n]);
    c.cluster_of[head_ids[n]] = n;
  }
  struct Pair {
    double corr;
    int cluster;
    int user;
  };
  std::vector<Pair> pairs;
  pairs.reserve(member_ids.size() * N);
  for (int k : member_ids)
    for (int n = 0; n < N; ++n) pairs.push_back({safe_correlation(channels[k], channels[head_ids[n]]), n, k});
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(b.corr, a.cluster, a.user) < std::tie(a.corr, b.cluster, b.user);
  });
  for (const auto& p : pairs) {
    if (c.cluster_of[p.user] >= 0) continue;
    if (static_cast<int>(c.members[p.cluster].size()) >= max_cluster_size) continue;
    c.members[p.cluster].push_back(p.user);
    c.cluster_of[p.user] = p.cluster;
  }
  return c;
}

CMat analog_beamformer(const std::vector<CRow>& head_channels, int n_sub, int phase_bits) {
  require(n_sub >= 1 && phase_bits >= 1, "analog_beamformer: bad dimensions");
  const int N = static_cast<int>(head_channels.size());
  const int levels = 1 << phase_bits;
  const double amp = 1.0 / std::sqrt(static_cast<double>(n_sub));
  CMat v = CMat::Zero(static_cast<Eigen::Index>(N) * n_sub, N);
  for (int n = 0; n < N; ++n) {
    require(head_channels[n].size() == static_cast<Eigen::Index>(N) * n_sub, "analog_beamformer: channel size");
    for (int i = 0; i < n_sub; ++i) {
      const cdouble h = head_channels[n](n * n_sub + i);
      int best = 0;
      if (std::abs(h) > 0) {
        const cdouble unit = h / std::abs(h);
        double best_dist = std::abs(cdouble(1, 0) - unit);
        for (int q = 1; q < levels; ++q) {
          const double d = std::abs(std::polar(1.0, 2.0 * kPi * q / levels) - unit);
          if (d < best_dist) {
            best_dist = d;
            best = q;
          }
        }
      }
      v(n * n_sub + i, n) = amp * std::polar(1.0, -2.0 * kPi * best / levels);
    }
  }
  return v;
}

ZfResult zf_digital_beamformer(const std::vector<CRow>& centers, const CMat& v, ZfMode mode,
                               double condition_threshold) {
  const auto N = static_cast<Eigen::Index>(centers.size());
  require(N == v.cols(), "zf_digital_beamformer: one center per RF chain");
  CMat H(N, v.rows());
  for (Eigen::Index n = 0; n < N; ++n) {
    require(centers[n].size() == v.rows(), "zf_digital_beamformer: center size");
    H.row(n) = centers[n];
  }
  const CMat A = mode == ZfMode::Composed ? CMat(H * v) : H;
  CMat gram = A * A.adjoint();
  ZfResult out;
  Eigen::JacobiSVD<CMat> svd(gram);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  out.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (out.condition > condition_threshold) {
    const double eps = 1e-8 * gram.trace().real() / static_cast<double>(N);
    gram += CMat::Identity(N, N) * eps;
    out.regularized = true;
  }
  CMat what = A.adjoint() * gram.inverse();
  if (mode == ZfMode::Raw) what = v.adjoint() * what;
  out.w = CMat::Zero(N, N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const double norm = (v * what.col(n)).norm();
    if (norm > 0 && std::isfinite(norm)) out.w.col(n) = what.col(n) / norm;
  }
  return out;
}

std::vector<int> decoding_order(const std::vector<int>& members, const std::vector<double>& gains) {
  require(members.size() == gains.size(), "decoding_order: size mismatch");
  std::vector<std::size_t> idx(members.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (gains[a] != gains[b]) return gains[a] > gains[b];
    return members[a] < members[b];
  });
  std::vector<int> out;
  out.reserve(members.size());
  for (auto i : idx) out.push_back(members[i]);
  return out;
}

int default_max_cluster_size(const NetworkConfig& config) {
  return (config.iot_users_per_ap + config.rf_chains - 1) / config.rf_chains + 1;
}

LinkLayerPlan build_plan(const EffectiveChannels& h, const Topology& topology, const NetworkConfig& config,
                         const LinkOptions& options) {
  const int M = topology.num_aps(), U = topology.num_users(), K = config.users_per_ap();
  const int NR = config.rf_chains, nsub = config.subarray_size();
  int max_size = options.max_cluster_size > 0 ? options.max_cluster_size : default_max_cluster_size(config);
  max_size = std::max(max_size, (K + NR - 1) / NR);
  LinkLayerPlan plan;
  plan.aps.resize(M);
  plan.cluster_of.assign(U, -1);
  plan.position.assign(U, 0);
  plan.own_gain.assign(U, 0.0);
  plan.is_head.assign(U, 0);
  for (int m = 0; m < M; ++m) {
    std::vector<CRow> local(K);
    for (int k = 0; k < K; ++k) local[k] = h[m][m * K + k];
    std::vector<int> heads, rest;
    if (options.heads == HeadSelection::Qos) {
      for (int k = 0; k < K; ++k) (topology.user_kind[m * K + k] == UserKind::SE ? heads : rest).push_back(k);
    } else {
      std::vector<int> order(K);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return local[a].squaredNorm() > local[b].squaredNorm(); });
      heads.assign(order.begin(), order.begin() + NR);
      std::sort(heads.begin(), heads.end());
      rest.assign(order.begin() + NR, order.end());
      std::sort(rest.begin(), rest.end());
    }
    const auto clustering = cluster_users(local, heads, rest, max_size, NR);
    std::vector<CRow> head_channels, centers;
    for (const auto& members : clustering.members) {
      head_channels.push_back(local[members[0]]);
      CRow c = CRow::Zero(config.antennas);
      for (int k : members) c += local[k];
      centers.push_back(c / static_cast<double>(members.size()));
    }
    auto& ap = plan.aps[m];
    ap.v = analog_beamformer(head_channels, nsub, config.analog_phase_bits);
    const auto zf = zf_digital_beamformer(centers, ap.v, options.zf_mode, options.condition_threshold);
    ap.w = zf.w;
    ap.zf_regularized = zf.regularized;
    ap.zf_condition = zf.condition;
    for (int n = 0; n < NR; ++n) ap.beams.push_back(ap.v * ap.w.col(n));
    for (int n = 0; n < NR; ++n) {
      const auto& members = clustering.members[n];
      std::vector<int> tail(members.begin() + 1, members.end());
      std::vector<double> gains;
      for (int k : tail) gains.push_back(std::norm(local[k].dot(ap.beams[n].conjugate())));
      std::vector<int> cluster{m * K + members[0]};
      for (int k : decoding_order(tail, gains)) cluster.push_back(m * K + k);
      for (std::size_t pos = 0; pos < cluster.size(); ++pos) {
        const int u = cluster[pos];
        plan.cluster_of[u] = n;
        plan.position[u] = static_cast<int>(pos) + 1;
        plan.own_gain[u] = std::norm((h[m][u] * ap.beams[n])(0));
        plan.is_head[u] = pos == 0;
      }
      ap.clusters.push_back(std::move(cluster));
    }
  }
  return plan;
}

std::vector<std::vector<double>> cluster_powers(const LinkLayerPlan& plan, const std::vector<double>& alpha) {
  std::vector<std::vector<double>> p(plan.aps.size());
  for (std::size_t m = 0; m < plan.aps.size(); ++m)
    for (const auto& c : plan.aps[m].clusters) {
      double s = 0;
      for (int u : c) s += alpha[u];
      p[m].push_back(s);
    }
  return p;
}

std::vector<double> interference(const EffectiveChannels& h, const LinkLayerPlan& plan,
                                 const std::vector<double>& alpha, const Topology& topology) {
  const int U = topology.num_users();
  require(static_cast<int>(alpha.size()) == U, "interference: one allocation per user");
  const auto p = cluster_powers(plan, alpha);
  std::vector<double> out(U, 0.0);
  for (int u = 0; u < U; ++u) {
    const int m = topology.ap_of_user[u], n = plan.cluster_of[u];
    double s = 0;
    for (std::size_t mp = 0; mp < plan.aps.size(); ++mp) {
      const auto& ap = plan.aps[mp];
      for (std::size_t np = 0; np < ap.beams.size(); ++np) {
        if (static_cast<int>(mp) == m && static_cast<int>(np) == n) continue;
        if (p[mp][np] == 0.0) continue;
        s += std::norm((h[mp][u] * ap.beams[np])(0)) * p[mp][np];
      }
    }
    out[u] = s;
  }
  return out;
}

SinrResult sinr_all(const EffectiveChannels& h, const LinkLayerPlan& plan, const std::vector<double>& alpha,
                    double noise_power, const Topology& topology) {
  const auto inter = interference(h, plan, alpha, topology);
  SinrResult r;
  r.sinr.assign(alpha.size(), 0.0);
  r.sic_fail.assign(alpha.size(), 0);
  for (const auto& ap : plan.aps) {
    for (const auto& c : ap.clusters) {
      const int head = c[0];
      const double g1 = plan.own_gain[head];
      double before = alpha[head];  // sum of alpha over earlier positions
      double residual = 0;
      for (std::size_t pos = 1; pos < c.size(); ++pos) {
        const int u = c[pos];
        const double gk = plan.own_gain[u];
        const double own = gk * alpha[u] / (gk * before + inter[u] + noise_power);
        const double at_head = g1 * alpha[u] / (g1 * before + inter[head] + noise_power);
        r.sinr[u] = own;
        r.sic_fail[u] = at_head < own;
        if (r.sic_fail[u]) residual += g1 * alpha[u];
        before += alpha[u];
      }
      r.sinr[head] = g1 * alpha[head] / (residual + inter[head] + noise_power);
    }
  }
  return r;
}

std::vector<std::uint8_t> sic_feasibility(const EffectiveChannels& h, const LinkLayerPlan& plan,
                                          const std::vector<double>& alpha, double noise_power,
                                          const Topology& topology) {
  return sinr_all(h, plan, alpha, noise_power, topology).sic_fail;
}

std::vector<double> rates(const std::vector<double>& sinr, double bandwidth_hz) {
  std::vector<double> out(sinr.size());
  for (std::size_t i = 0; i < sinr.size(); ++i) {
    require(sinr[i] >= 0, "rates: negative SINR");
    out[i] = bandwidth_hz * std::log2(1.0 + sinr[i]);
  }
  return out;
}

double power_consumption(const std::vector<double>& alpha, const std::vector<RisAction>& ris,
                         const NetworkConfig& config) {
  double tx = 0;
  for (double a : alpha) tx += a;
  int active = 0;
  for (const auto& r : ris) active += static_cast<int>(std::count(r.on_off.begin(), r.on_off.end(), 1));
  return config.pa_inefficiency * tx + config.total_users() * config.p_device_w +
         config.num_aps * config.ap_circuit_power() + active * config.p_ris_element_w;
}

double energy_efficiency(const std::vector<double>& rates_bps, double power_w) {
  require(power_w > 0, "energy_efficiency: power must be positive");
  double s = 0;
  for (double r : rates_bps) s += r;
  return s / power_w;
}

}  // namespace rismarl
