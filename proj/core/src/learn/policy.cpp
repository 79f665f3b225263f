// SPDX-License-Identifier: Apache-2.0
#include "rismarl/learn/policy.hpp"

#include <cmath>
#include <random>

namespace rismarl {

using ad::Activation;
using ad::Dense;
using ad::Tape;
using ad::Var;

Variant parse_variant(const std::string& name) {
  if (name == "gevdac") return Variant::GeVdac;
  if (name == "vdac") return Variant::Vdac;
  if (name == "ie-vdac") return Variant::IeVdac;
  if (name == "central-critic") return Variant::Central;
  throw InvalidArgument("unknown learner: " + name);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::GeVdac:
      return "gevdac";
    case Variant::Vdac:
      return "vdac";
    case Variant::IeVdac:
      return "ie-vdac";
    case Variant::Central:
      return "central-critic";
  }
  return "gevdac";
}

Exchange variant_exchange(Variant v) {
  switch (v) {
    case Variant::GeVdac:
      return Exchange::Embedded;
    case Variant::IeVdac:
      return Exchange::Raw;
    default:
      return Exchange::None;
  }
}

PolicyDims PolicyDims::from_env(const Environment& env) {
  const auto& net = env.net();
  PolicyDims d;
  d.num_aps = net.num_aps;
  d.num_ris = net.num_ris;
  d.users_per_ap = net.users_per_ap();
  d.ris_elements = net.ris_elements;
  d.phase_levels = net.phase_levels();
  d.max_power_w = net.max_tx_power_w;
  const auto g = env.comm_graph();
  d.node_dim = g.node_dim;
  d.edge_dim = g.edge_dim;
  d.obs_dim = {env.padded_observation_dim(AgentType::Ap), env.padded_observation_dim(AgentType::Ris)};
  d.digest_dim = env.global_digest_dim();
  return d;
}

// ---------------------------------------------------------------------------

GraphEmbedder::GraphEmbedder(ad::ParamStore& store, const PolicyDims& dims, int embed_dim, int layers,
                             ad::Aggregation agg, Exchange exchange)
    : exchange_(exchange),
      embed_dim_(embed_dim),
      layers_(layers),
      agg_(agg),
      node_dim_(dims.node_dim),
      edge_dim_(dims.edge_dim) {
  require(embed_dim > 0 && layers >= 0, "GraphEmbedder: bad embedding size");
  for (int u = 0; u < kNumNodeTypes; ++u) {
    if (exchange == Exchange::Raw) {
      out_dim_[u] = dims.obs_dim[u];
      for (int e = 0; e < kNumEdgeTypes; ++e)
        if (edge_target_type(e) == u) out_dim_[u] += edge_dim_[e];
    } else {
      out_dim_[u] = dims.obs_dim[u] + (layers > 0 ? embed_dim : node_dim_[u]);
    }
  }
  if (exchange == Exchange::Raw) return;
  for (int n = 0; n < layers; ++n) {
    auto in_dim = [&](int u) { return n == 0 ? node_dim_[u] : embed_dim; };
    const std::string tag = "embed.l" + std::to_string(n);
    std::array<Dense, kNumEdgeTypes> msg{};
    if (exchange == Exchange::Embedded)
      for (int e = 0; e < kNumEdgeTypes; ++e)
        msg[e] = Dense::create(store, tag + ".msg" + std::to_string(e), in_dim(edge_source_type(e)) + edge_dim_[e],
                               embed_dim, Activation::Tanh);
    std::array<Dense, kNumNodeTypes> upd{};
    for (int u = 0; u < kNumNodeTypes; ++u)
      upd[u] = Dense::create(store, tag + ".upd" + std::to_string(u), in_dim(u) + embed_dim, embed_dim,
                             Activation::Tanh);
    message_.push_back(msg);
    update_.push_back(upd);
  }
}

std::vector<Var> GraphEmbedder::operator()(Tape& t, const CommGraph& g, const std::vector<Eigen::VectorXd>& obs) const {
  const int V = g.num_nodes();
  require(static_cast<int>(obs.size()) == V, "GraphEmbedder: one observation per node expected");
  std::vector<Var> o(V);
  for (int i = 0; i < V; ++i) {
    o[i] = t.constant(obs[i]);
  }
  std::vector<Var> out(V);
  if (exchange_ == Exchange::Raw) {
    for (int i = 0; i < V; ++i) {
      std::vector<Var> parts{o[i]};
      for (int e = 0; e < kNumEdgeTypes; ++e) {
        if (edge_target_type(e) != g.nodes[i].type) continue;
        std::vector<Var> items;
        for (int id : g.inbound[i])
          if (g.edges[id].type == e) items.push_back(t.constant(g.edges[id].feature));
        parts.push_back(ad::aggregate(t, ad::Aggregation::Mean, items, edge_dim_[e]));
      }
      out[i] = ad::concat(t, parts);
    }
    return out;
  }
  std::vector<Var> z(V);
  for (int i = 0; i < V; ++i) z[i] = t.constant(g.nodes[i].feature);
  std::vector<Var> d;
  if (exchange_ == Exchange::Embedded)
    for (const auto& e : g.edges) d.push_back(t.constant(e.feature));
  for (int n = 0; n < layers_; ++n) {
    std::vector<Var> msg;
    if (exchange_ == Exchange::Embedded)
      for (int k = 0; k < g.num_edges(); ++k) {
        const auto& e = g.edges[k];
        msg.push_back(message_[n][e.type](t, ad::concat(t, {z[e.src], d[k]})));
      }
    std::vector<Var> next(V);
    for (int i = 0; i < V; ++i) {
      std::vector<Var> items;
      if (exchange_ == Exchange::Embedded)
        for (int id : g.inbound[i]) items.push_back(msg[id]);
      Var agg = ad::aggregate(t, agg_, items, embed_dim_);
      next[i] = update_[n][g.nodes[i].type](t, ad::concat(t, {z[i], agg}));
    }
    z = std::move(next);
  }
  for (int i = 0; i < V; ++i) out[i] = ad::concat(t, {o[i], z[i]});
  return out;
}

double GraphEmbedder::exchange_volume(const CommGraph& g) const {
  switch (exchange_) {
    case Exchange::Embedded:
      return static_cast<double>(g.num_edges()) * embed_dim_ * layers_;
    case Exchange::None:
      return 0.0;
    case Exchange::Raw: {
      double v = 0;
      for (const auto& e : g.edges) v += static_cast<double>(e.feature.size());
      return v;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

StepInput StepInput::from_env(const Environment& env, std::vector<Eigen::VectorXd> hidden) {
  StepInput in;
  in.graph = env.comm_graph();
  for (int i = 0; i < env.num_agents(); ++i) in.obs.push_back(env.padded_observation(i));
  in.digest = env.global_digest();
  in.hidden = std::move(hidden);
  return in;
}

Policy::Policy(const PolicyDims& dims, const PolicyConfig& cfg, std::uint64_t seed)
    : dims_(dims), cfg_(cfg), theta_(derive_seed(seed, "theta")), mu_(derive_seed(seed, "mu")) {
  require(dims.num_aps > 0 && dims.users_per_ap > 0, "Policy: at least one AP with users required");
  require(cfg.hidden > 0 && cfg.log_std_min < cfg.log_std_max, "Policy: bad configuration");
  const bool central = cfg.variant == Variant::Central;
  if (!central)
    embedder_ = GraphEmbedder(theta_, dims, cfg.embed_dim, cfg.embed_layers, cfg.aggregation,
                              variant_exchange(cfg.variant));
  const char* names[kNumNodeTypes] = {"ap", "ris"};
  for (int u = 0; u < kNumNodeTypes; ++u) {
    const std::string p = std::string("actor.") + names[u];
    const int in = central ? dims.obs_dim[u] : embedder_.output_dim(u);
    trunk_[u] = Dense::create(theta_, p + ".trunk", in, cfg.hidden, Activation::Tanh);
    gru_[u] = ad::Gru::create(theta_, p + ".gru", cfg.hidden, cfg.hidden);
  }
  const int K = dims.users_per_ap, L = dims.ris_elements;
  ap_head_ = Dense::create(theta_, "actor.ap.mean", cfg.hidden, K + 1, Activation::Identity);
  ap_log_std_ = &theta_.add("actor.ap.log_std", K + 1, 1, ad::InitScheme::Constant, cfg.log_std_init);
  ris_onoff_head_ = Dense::create(theta_, "actor.ris.onoff", cfg.hidden, L, Activation::Identity);
  ris_phase_head_ = Dense::create(theta_, "actor.ris.phase", cfg.hidden, L * dims.phase_levels, Activation::Identity);
  if (central) {
    const int in = dims.num_aps * dims.obs_dim[kApNode] + dims.num_ris * dims.obs_dim[kRisNode];
    central1_ = Dense::create(theta_, "critic.central.l1", in, cfg.central_hidden, Activation::Tanh);
    central2_ = Dense::create(theta_, "critic.central.l2", cfg.central_hidden, 1, Activation::Identity);
  } else {
    for (int u = 0; u < kNumNodeTypes; ++u)
      value_head_[u] = Dense::create(theta_, std::string("critic.") + names[u], cfg.hidden, 1, Activation::Identity);
    mixer_ = ad::HyperMixer::create(mu_, "mixer", dims.digest_dim, dims.num_agents(), cfg.mixer_hidden);
  }
}

std::vector<Eigen::VectorXd> Policy::initial_hidden() const {
  return std::vector<Eigen::VectorXd>(dims_.num_agents(), Eigen::VectorXd::Zero(cfg_.hidden));
}

PolicyForward Policy::forward(Tape& t, const StepInput& in) const {
  const int V = in.graph.num_nodes();
  require(static_cast<int>(in.obs.size()) == V && static_cast<int>(in.hidden.size()) == V,
          "Policy: observations and hidden states must match the graph");
  const bool central = cfg_.variant == Variant::Central;
  std::vector<Var> ztilde;
  if (central) {
    for (const auto& o : in.obs) ztilde.push_back(t.constant(o));
  } else {
    ztilde = embedder_(t, in.graph, in.obs);
  }
  PolicyForward f;
  f.type.resize(V);
  f.hidden_out.resize(V);
  f.ap_mean.resize(V);
  f.ap_log_std.resize(V);
  f.ris_onoff.resize(V);
  f.ris_phase.resize(V);
  for (int i = 0; i < V; ++i) {
    const int u = in.graph.nodes[i].type;
    f.type[i] = u;
    Var x = trunk_[u](t, ztilde[i]);
    Var h = gru_[u](t, x, t.constant(in.hidden[i]));
    f.hidden_out[i] = h;
    if (u == kApNode) {
      f.ap_mean[i] = ap_head_(t, h);
      f.ap_log_std[i] = ad::clamp(t, t.param(*ap_log_std_), cfg_.log_std_min, cfg_.log_std_max);
    } else {
      f.ris_onoff[i] = ris_onoff_head_(t, h);
      f.ris_phase[i] = ris_phase_head_(t, h);
    }
    if (!central) f.local_values.push_back(value_head_[u](t, h));
  }
  if (central) {
    Eigen::Index n = 0;
    for (const auto& o : in.obs) n += o.size();
    Eigen::VectorXd all(n);
    n = 0;
    for (const auto& o : in.obs) {
      all.segment(n, o.size()) = o;
      n += o.size();
    }
    f.v_tot = central2_(t, central1_(t, t.constant(all)));
  } else {
    f.v_tot = mixer_(t, t.constant(in.digest), ad::concat(t, f.local_values));
  }
  return f;
}

SampledAction Policy::sample(const Tape& t, const PolicyForward& f, Rng& rng, bool greedy) const {
  const int V = static_cast<int>(f.type.size());
  const int L = dims_.ris_elements, levels = dims_.phase_levels;
  SampledAction a;
  a.ap_x.resize(V);
  a.ris_on.resize(V);
  a.ris_phase.resize(V);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < V; ++i) {
    if (f.type[i] == kApNode) {
      const auto& mean = t.value(f.ap_mean[i]);
      const auto& ls = t.value(f.ap_log_std[i]);
      Eigen::MatrixXd x = mean;
      if (!greedy)
        for (Eigen::Index k = 0; k < x.rows(); ++k) x(k, 0) += std::exp(ls(k, 0)) * normal(rng);
      a.ap_x[i] = x;
    } else {
      const auto& lo = t.value(f.ris_onoff[i]);
      const auto& lp = t.value(f.ris_phase[i]);
      Eigen::VectorXi on(L), ph(L);
      for (int l = 0; l < L; ++l) {
        const double p = 1.0 / (1.0 + std::exp(-lo(l, 0)));
        on(l) = greedy ? (lo(l, 0) > 0 ? 1 : 0) : (unif(rng) < p ? 1 : 0);
        const auto seg = lp.middleRows(static_cast<Eigen::Index>(l) * levels, levels);
        int pick = 0;
        if (greedy) {
          for (int c = 1; c < levels; ++c)
            if (seg(c, 0) > seg(pick, 0)) pick = c;
        } else {
          const double mx = seg.maxCoeff();
          Eigen::VectorXd w = (seg.array() - mx).exp().matrix();
          double r = unif(rng) * w.sum();
          pick = levels - 1;
          for (int c = 0; c < levels; ++c) {
            r -= w(c);
            if (r < 0) {
              pick = c;
              break;
            }
          }
        }
        ph(l) = pick;
      }
      a.ris_on[i] = on;
      a.ris_phase[i] = ph;
    }
  }
  return a;
}

Var Policy::log_prob(Tape& t, const PolicyForward& f, const SampledAction& a) const {
  Var total = t.constant(Eigen::MatrixXd::Zero(1, 1));
  for (std::size_t i = 0; i < f.type.size(); ++i) {
    if (f.type[i] == kApNode) {
      total = ad::add(t, total, ad::gaussian_logprob(t, f.ap_mean[i], f.ap_log_std[i], a.ap_x[i]));
    } else {
      total = ad::add(t, total, ad::bernoulli_logprob(t, f.ris_onoff[i], a.ris_on[i]));
      total = ad::add(t, total, ad::categorical_logprob(t, f.ris_phase[i], dims_.phase_levels, a.ris_phase[i]));
    }
  }
  return total;
}

JointAction Policy::to_joint_action(const SampledAction& a) const {
  const int M = dims_.num_aps, J = dims_.num_ris, K = dims_.users_per_ap;
  require(static_cast<int>(a.ap_x.size()) == M + J, "Policy: sample does not match the agent count");
  JointAction out;
  out.power.resize(M);
  for (int m = 0; m < M; ++m) {
    const auto& x = a.ap_x[m];
    const double mx = x.topRows(K).maxCoeff();
    Eigen::VectorXd w = (x.topRows(K).array() - mx).exp().matrix();
    const double total = dims_.max_power_w / (1.0 + std::exp(-x(K, 0)));
    const double s = w.sum();
    out.power[m].resize(K);
    for (int k = 0; k < K; ++k) out.power[m][k] = total * w(k) / s;
  }
  for (int j = 0; j < J; ++j) {
    const auto& on = a.ris_on[M + j];
    const auto& ph = a.ris_phase[M + j];
    RisAction r;
    r.on_off.assign(on.data(), on.data() + on.size());
    r.phase_index.assign(ph.data(), ph.data() + ph.size());
    out.ris.push_back(std::move(r));
  }
  return out;
}

}  // namespace rismarl
