// SPDX-License-Identifier: Apache-2.0
#include "rismarl/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rismarl {

void EnvConfig::validate() const {
  require(se_arrival_mean >= 0 && iot_arrival_mean >= 0, "arrival means must be non-negative");
  require(se_queue_max > 0 && iot_queue_max > 0, "queue maxima must be positive");
  require(outage_eps > 0 && outage_eps <= 1, "outage_eps must be in (0, 1]");
  require(se_rate_min_gbps >= 0 && iot_rate_min_gbps >= 0, "rate minima must be non-negative");
  require(zeta >= 0 && penalty_xi >= 0, "reward weights must be non-negative");
  require(episode_length > 0, "episode_length must be positive");
  require(arrival_cap_factor >= 1, "arrival_cap_factor must be >= 1");
  require(slot_duration_s > 0, "slot_duration_s must be positive");
  require(max_cluster_size >= 0, "max_cluster_size must be non-negative");
  require(zf_condition_threshold > 1, "zf_condition_threshold must exceed 1");
}

EnvConfig EnvConfig::from_key_values(const KeyValues& kv) {
  EnvConfig c;
  auto d = [&](const char* k, double& v) { v = kv.get_double(k, v); };
  d("se_arrival_mean", c.se_arrival_mean);
  d("iot_arrival_mean", c.iot_arrival_mean);
  d("se_queue_max", c.se_queue_max);
  d("iot_queue_max", c.iot_queue_max);
  d("outage_eps", c.outage_eps);
  d("se_rate_min_gbps", c.se_rate_min_gbps);
  d("iot_rate_min_gbps", c.iot_rate_min_gbps);
  d("zeta", c.zeta);
  d("penalty_xi", c.penalty_xi);
  c.episode_length = static_cast<int>(kv.get_int("episode_length", c.episode_length));
  d("arrival_cap_factor", c.arrival_cap_factor);
  d("slot_duration_s", c.slot_duration_s);
  c.max_cluster_size = static_cast<int>(kv.get_int("max_cluster_size", c.max_cluster_size));
  const auto zf = kv.get_string("zf_mode", "composed");
  require(zf == "composed" || zf == "raw", "zf_mode must be 'composed' or 'raw'");
  c.zf_mode = zf == "raw" ? ZfMode::Raw : ZfMode::Composed;
  d("zf_condition_threshold", c.zf_condition_threshold);
  c.validate();
  return c;
}

void EnvConfig::to_key_values(KeyValues& kv) const {
  auto put = [&](const char* k, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    kv.set(k, os.str());
  };
  put("se_arrival_mean", se_arrival_mean);
  put("iot_arrival_mean", iot_arrival_mean);
  put("se_queue_max", se_queue_max);
  put("iot_queue_max", iot_queue_max);
  put("outage_eps", outage_eps);
  put("se_rate_min_gbps", se_rate_min_gbps);
  put("iot_rate_min_gbps", iot_rate_min_gbps);
  put("zeta", zeta);
  put("penalty_xi", penalty_xi);
  put("episode_length", episode_length);
  put("arrival_cap_factor", arrival_cap_factor);
  put("slot_duration_s", slot_duration_s);
  put("max_cluster_size", max_cluster_size);
  kv.set("zf_mode", zf_mode == ZfMode::Raw ? "raw" : "composed");
  put("zf_condition_threshold", zf_condition_threshold);
}

namespace {

Topology make_topology(const NetworkConfig& net) {
  net.validate();
  Rng rng(derive_seed(net.rng_seed, "topology"));
  return build_topology(net, rng);
}

void push_complex(Eigen::VectorXd& out, Eigen::Index& at, const cdouble& z, double scale) {
  out(at++) = z.real() / scale;
  out(at++) = z.imag() / scale;
}

}  // namespace

Environment::Environment(const NetworkConfig& net, const EnvConfig& env, std::uint64_t seed)
    : net_(net), env_(env), seed_(seed), topology_(make_topology(net)), sampler_(net, topology_) {
  env_.validate();
  reset(0);
}

void Environment::reset(std::uint64_t episode) {
  rng_.seed(derive_seed(seed_, "episode/" + std::to_string(episode)));
  sampler_.resample_geometry(rng_);
  channels_ = sampler_.sample(rng_);
  const int U = topology_.num_users();
  queues_.q.assign(U, 0.0);
  queues_.y.assign(U, 0.0);
  last_action_.power.assign(net_.num_aps, std::vector<double>(net_.users_per_ap(), 0.0));
  last_action_.ris.assign(net_.num_ris, RisAction::all_off(net_.ris_elements));
  t_ = 0;
}

void Environment::set_queues(const QueueState& queues) {
  require(queues.q.size() == queues_.q.size() && queues.y.size() == queues_.y.size(), "set_queues: size mismatch");
  for (std::size_t u = 0; u < queues.q.size(); ++u)
    require(queues.q[u] >= 0 && queues.y[u] >= 0, "set_queues: negative backlog");
  queues_ = queues;
}

void Environment::check_action(const JointAction& a) const {
  require(static_cast<int>(a.power.size()) == net_.num_aps, "action: one power vector per AP");
  for (const auto& p : a.power) {
    require(static_cast<int>(p.size()) == net_.users_per_ap(), "action: one allocation per user");
    double s = 0;
    for (double v : p) {
      require(v >= 0 && std::isfinite(v), "action: allocations must be finite and non-negative");
      s += v;
    }
    require(s <= net_.max_tx_power_w * (1 + 1e-12), "action: AP power budget exceeded");
  }
  require(static_cast<int>(a.ris.size()) == net_.num_ris, "action: one configuration per RIS");
  for (const auto& r : a.ris) {
    require(static_cast<int>(r.on_off.size()) == net_.ris_elements &&
                static_cast<int>(r.phase_index.size()) == net_.ris_elements,
            "action: RIS configuration length");
  }
}

JointAction Environment::project(JointAction a) const {
  for (auto& p : a.power) {
    double s = 0;
    for (auto& v : p) {
      if (!(v > 0)) v = 0;
      s += v;
    }
    if (s > net_.max_tx_power_w) {
      const double k = net_.max_tx_power_w / s;
      for (auto& v : p) v *= k;
    }
  }
  return a;
}

std::vector<double> Environment::queue_max() const {
  std::vector<double> out;
  for (auto k : topology_.user_kind) out.push_back(k == UserKind::SE ? env_.se_queue_max : env_.iot_queue_max);
  return out;
}

std::vector<double> Environment::rate_min_gbps() const {
  std::vector<double> out;
  for (auto k : topology_.user_kind)
    out.push_back(k == UserKind::SE ? env_.se_rate_min_gbps : env_.iot_rate_min_gbps);
  return out;
}

double Environment::arrival_cap(int user) const {
  const double mean = topology_.user_kind[user] == UserKind::SE ? env_.se_arrival_mean : env_.iot_arrival_mean;
  return env_.arrival_cap_factor * mean;
}

double Environment::rate_cap_gbps() const {
  return net_.bandwidth_hz * 1e-9 * std::log2(1.0 + net_.max_tx_power_w / net_.noise_power_w);
}

std::vector<double> Environment::lambda() const {
  std::vector<double> out(queues_.q.size());
  for (std::size_t u = 0; u < out.size(); ++u) out[u] = queues_.y[u] + 2.0 * queues_.q[u];
  return out;
}

StepOutcome Environment::evaluate(const JointAction& action, const StepOptions& options) const {
  check_action(action);
  const int U = topology_.num_users(), K = net_.users_per_ap();
  const auto h = effective_channels(channels_, action.ris, topology_, net_);
  LinkOptions lo;
  lo.heads = options.heads;
  lo.zf_mode = env_.zf_mode;
  lo.max_cluster_size = env_.max_cluster_size;
  lo.condition_threshold = env_.zf_condition_threshold;
  const auto plan = build_plan(h, topology_, net_, lo);
  std::vector<double> alpha(U);
  for (int u = 0; u < U; ++u) alpha[u] = action.power[u / K][u % K];
  const auto sinr = sinr_all(h, plan, alpha, net_.noise_power_w, topology_);
  const auto r_bps = rates(sinr.sinr, net_.bandwidth_hz);
  StepOutcome out;
  out.t = t_;
  out.power_w = power_consumption(alpha, action.ris, net_);
  out.eta = energy_efficiency(r_bps, out.power_w) * 1e-9;
  out.rates_gbps.resize(U);
  for (int u = 0; u < U; ++u) out.rates_gbps[u] = r_bps[u] * 1e-9;
  for (double r : out.rates_gbps) out.sum_rate_gbps += r;
  out.delta = rate_violation(out.rates_gbps, rate_min_gbps());
  out.lambda = lambda();
  out.reward = reward(out.eta, out.delta, out.lambda, out.rates_gbps, env_.zeta, env_.penalty_xi);
  out.sinr = sinr.sinr;
  out.sic_fail = sinr.sic_fail;
  out.is_head = plan.is_head;
  for (const auto& ap : plan.aps) out.zf_regularized = out.zf_regularized || ap.zf_regularized;
  out.q = queues_.q;
  out.y = queues_.y;
  return out;
}

StepOutcome Environment::step(const JointAction& action, const StepOptions& options) {
  require(!done(), "step: episode finished, call reset");
  StepOutcome out = evaluate(action, options);
  const int U = topology_.num_users();
  const auto qmax = queue_max();
  out.arrivals.resize(U);
  out.outage.resize(U);
  for (int u = 0; u < U; ++u) {
    const double mean = topology_.user_kind[u] == UserKind::SE ? env_.se_arrival_mean : env_.iot_arrival_mean;
    double a = 0;
    if (mean > 0) a = static_cast<double>(std::poisson_distribution<long>(mean)(rng_));
    a = std::min(a, arrival_cap(u));
    out.arrivals[u] = a;
    const double qn = update_queue(queues_.q[u], out.rates_gbps[u], a);
    queues_.y[u] = update_virtual_queue(queues_.y[u], qn, qmax[u], env_.outage_eps);
    queues_.q[u] = qn;
    out.outage[u] = qn >= qmax[u];
  }
  out.q = queues_.q;
  out.y = queues_.y;
  last_action_ = action;
  ++t_;
  channels_ = sampler_.sample(rng_);
  return out;
}

AgentType Environment::agent_type(int agent) const {
  require(agent >= 0 && agent < num_agents(), "agent index out of range");
  return agent < net_.num_aps ? AgentType::Ap : AgentType::Ris;
}

double Environment::channel_scale_direct() const {
  const double a5 = net_.path_amplitude_gain() *
                    std::sqrt(std::pow(10.0, path_loss_db(net_.carrier_freq_hz, 5.0, net_.absorption_coeff) / 10.0));
  return a5 / std::sqrt(static_cast<double>(net_.antennas));
}

double Environment::channel_scale_f() const {
  return channel_scale_direct() * std::sqrt(static_cast<double>(net_.antennas)) * net_.ris_link_amplitude_gain();
}

double Environment::channel_scale_g() const { return channel_scale_direct() * net_.ris_link_amplitude_gain(); }

Eigen::VectorXd Environment::direct_block(int ap, int target_ap) const {
  const int K = net_.users_per_ap(), NA = net_.antennas;
  Eigen::VectorXd out(2 * K * NA);
  Eigen::Index at = 0;
  const double s = channel_scale_direct();
  for (int k = 0; k < K; ++k)
    for (int a = 0; a < NA; ++a) push_complex(out, at, channels_.direct[ap][target_ap * K + k](a), s);
  return out;
}

Eigen::VectorXd Environment::f_block(int ris, int ap) const {
  const int K = net_.users_per_ap(), L = net_.ris_elements;
  Eigen::VectorXd out(2 * K * L);
  Eigen::Index at = 0;
  const double s = channel_scale_f();
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) push_complex(out, at, channels_.ris_to_user[ris][ap * K + k](l), s);
  return out;
}

Eigen::VectorXd Environment::g_block(int ap, int ris) const {
  const int L = net_.ris_elements, NA = net_.antennas;
  Eigen::VectorXd out(2 * L * NA);
  Eigen::Index at = 0;
  const double s = channel_scale_g();
  const auto& g = channels_.ap_to_ris[ap][ris];
  for (int l = 0; l < L; ++l)
    for (int a = 0; a < NA; ++a) push_complex(out, at, g(l, a), s);
  return out;
}

Eigen::VectorXd Environment::tau(int agent) const {
  if (agent_type(agent) == AgentType::Ap) {
    const auto& p = last_action_.power[agent];
    Eigen::VectorXd out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) out(static_cast<Eigen::Index>(k)) = p[k] / net_.max_tx_power_w;
    return out;
  }
  const auto& r = last_action_.ris[agent - net_.num_aps];
  const int L = net_.ris_elements;
  const double top = std::max(1, net_.phase_levels() - 1);
  Eigen::VectorXd out(2 * L);
  for (int l = 0; l < L; ++l) {
    out(l) = r.on_off[l];
    out(L + l) = r.phase_index[l] / top;
  }
  return out;
}

AgentObservation Environment::observe(int agent) const {
  AgentObservation o;
  o.agent = agent;
  o.type = agent_type(agent);
  std::vector<Eigen::VectorXd> blocks;
  if (o.type == AgentType::Ap) {
    const int i = agent, K = net_.users_per_ap();
    blocks.push_back(direct_block(i, i));
    o.block_names.push_back("direct/" + std::to_string(i));
    for (int m : topology_.ap_ap_neighbors[i]) {
      blocks.push_back(direct_block(i, m));
      o.block_names.push_back("direct/" + std::to_string(m));
    }
    const auto lam = lambda();
    Eigen::VectorXd l(K);
    for (int k = 0; k < K; ++k) l(k) = std::log1p(lam[i * K + k]);
    blocks.push_back(l);
    o.block_names.push_back("lambda");
  } else {
    const int j = agent - net_.num_aps;
    for (int m : topology_.ris_ap_neighbors[j]) {
      blocks.push_back(f_block(j, m));
      o.block_names.push_back("ris_user/" + std::to_string(m));
    }
    for (int m : topology_.ris_ap_neighbors[j]) {
      blocks.push_back(g_block(m, j));
      o.block_names.push_back("ap_ris/" + std::to_string(m));
    }
  }
  blocks.push_back(tau(agent));
  o.block_names.push_back("last_action");
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.size();
  o.values.resize(total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    o.values.segment(at, b.size()) = b;
    o.block_sizes.push_back(static_cast<int>(b.size()));
    at += b.size();
  }
  return o;
}

int Environment::padded_observation_dim(AgentType type) const {
  const int K = net_.users_per_ap(), NA = net_.antennas, L = net_.ris_elements, M = net_.num_aps;
  if (type == AgentType::Ap) return M * 2 * K * NA + 2 * K;
  return M * (2 * K * L + 2 * L * NA) + 2 * L;
}

Eigen::VectorXd Environment::padded_observation(int agent) const {
  const auto type = agent_type(agent);
  const int K = net_.users_per_ap(), NA = net_.antennas, L = net_.ris_elements, M = net_.num_aps;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(padded_observation_dim(type));
  Eigen::Index at = 0;
  if (type == AgentType::Ap) {
    const int i = agent;
    const Eigen::Index blk = 2 * K * NA;
    out.segment(at, blk) = direct_block(i, i);
    at += blk;
    for (int m : topology_.ap_ap_neighbors[i]) {
      out.segment(at, blk) = direct_block(i, m);
      at += blk;
    }
    at = static_cast<Eigen::Index>(M) * blk;
    const auto lam = lambda();
    for (int k = 0; k < K; ++k) out(at++) = std::log1p(lam[i * K + k]);
  } else {
    const int j = agent - M;
    const Eigen::Index blk = 2 * K * L + 2 * L * NA;
    for (int m : topology_.ris_ap_neighbors[j]) {
      out.segment(at, 2 * K * L) = f_block(j, m);
      out.segment(at + 2 * K * L, 2 * L * NA) = g_block(m, j);
      at += blk;
    }
    at = static_cast<Eigen::Index>(M) * blk;
  }
  const auto t = tau(agent);
  out.segment(at, t.size()) = t;
  return out;
}

CommGraph Environment::comm_graph() const {
  const int M = net_.num_aps, J = net_.num_ris, K = net_.users_per_ap();
  const int NA = net_.antennas, L = net_.ris_elements;
  CommGraph g;
  const auto lam = lambda();
  for (int i = 0; i < M; ++i) {
    const auto h = direct_block(i, i);
    const auto t = tau(i);
    Eigen::VectorXd f(h.size() + K + t.size());
    f << h, Eigen::VectorXd::Zero(K), t;
    for (int k = 0; k < K; ++k) f(h.size() + k) = std::log1p(lam[i * K + k]);
    g.nodes.push_back({kApNode, f});
  }
  for (int j = 0; j < J; ++j) g.nodes.push_back({kRisNode, tau(M + j)});
  for (int i = 0; i < M; ++i) {
    for (int j : topology_.ap_ris_neighbors[i]) {
      // channels from AP i to the users of every AP neighboring RIS j, averaged over those APs
      Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * K * NA);
      const auto& aps = topology_.ris_ap_neighbors[j];
      for (int m : aps) d += direct_block(i, m);
      if (!aps.empty()) d /= static_cast<double>(aps.size());
      g.edges.push_back({i, M + j, kApToRis, d});
    }
  }
  for (int j = 0; j < J; ++j) {
    for (int i : topology_.ris_ap_neighbors[j]) {
      const auto gb = g_block(i, j);
      const auto fb = f_block(j, i);
      Eigen::VectorXd d(gb.size() + fb.size());
      d << gb, fb;
      g.edges.push_back({M + j, i, kRisToAp, d});
    }
  }
  for (int i = 0; i < M; ++i)
    for (int m : topology_.ap_ap_neighbors[i]) g.edges.push_back({i, m, kApToAp, direct_block(i, m)});
  g.node_dim = {2 * K * NA + 2 * K, 2 * L};
  g.edge_dim = {2 * K * NA, 2 * L * NA + 2 * K * L, 2 * K * NA};
  g.finalize();
  return g;
}

int Environment::global_digest_dim() const { return 2 * topology_.num_users() + net_.num_ris; }

Eigen::VectorXd Environment::global_digest() const {
  const int U = topology_.num_users(), J = net_.num_ris;
  Eigen::VectorXd s(global_digest_dim());
  const auto lam = lambda();
  const double ref = channel_scale_direct();
  for (int u = 0; u < U; ++u) {
    s(u) = std::log1p(lam[u]);
    const double g = channels_.direct[topology_.ap_of_user[u]][u].squaredNorm() / (ref * ref * net_.antennas);
    s(U + u) = std::log1p(g);
  }
  for (int j = 0; j < J; ++j) {
    const auto& on = last_action_.ris[j].on_off;
    s(2 * U + j) = static_cast<double>(std::count(on.begin(), on.end(), 1)) / net_.ris_elements;
  }
  return s;
}

std::uint64_t Environment::checksum() const {
  KeyValues kv;
  net_.to_key_values(kv);
  env_.to_key_values(kv);
  std::uint64_t h = fnv1a("rismarl-env");
  for (const auto& [k, v] : kv.entries()) {
    h = fnv1a(k, h);
    h = fnv1a(v, h);
  }
  const auto th = topology_.hash();
  return fnv1a(&th, sizeof th, h);
}

}  // namespace rismarl
