// SPDX-License-Identifier: Apache-2.0
#include "rismarl/ad/layers.hpp"

#include "rismarl/common.hpp"

namespace rismarl::ad {

Dense Dense::create(ParamStore& store, const std::string& name, int in, int out, Activation act) {
  require(in > 0 && out > 0, "Dense: dimensions must be positive");
  Dense d;
  d.w = &store.add(name + ".w", out, in, InitScheme::UniformFanIn, in);
  d.b = &store.add(name + ".b", out, 1, InitScheme::Zeros);
  d.act = act;
  d.in = in;
  d.out = out;
  return d;
}

Var Dense::operator()(Tape& t, Var x) const {
  require(t.value(x).rows() == in && t.value(x).cols() == 1, "Dense: input shape mismatch");
  return activate(t, affine(t, t.param(*w), x, t.param(*b)), act);
}

Gru Gru::create(ParamStore& store, const std::string& name, int in, int hidden) {
  require(in > 0 && hidden > 0, "Gru: dimensions must be positive");
  Gru g;
  g.w = &store.add(name + ".w", 3 * hidden, in, InitScheme::UniformFanIn, in);
  g.u = &store.add(name + ".u", 3 * hidden, hidden, InitScheme::UniformFanIn, hidden);
  g.b = &store.add(name + ".b", 3 * hidden, 1, InitScheme::Zeros);
  g.in = in;
  g.hidden = hidden;
  return g;
}

Var Gru::operator()(Tape& t, Var x, Var h) const {
  require(t.value(x).rows() == in && t.value(h).rows() == hidden, "Gru: input shape mismatch");
  const int H = hidden;
  Var wx = affine(t, t.param(*w), x, t.param(*b));
  Var uh = matmul(t, t.param(*u), h);
  Var z = sigmoid(t, add(t, slice(t, wx, 0, H), slice(t, uh, 0, H)));
  Var r = sigmoid(t, add(t, slice(t, wx, H, H), slice(t, uh, H, H)));
  Var n = tanh(t, add(t, slice(t, wx, 2 * H, H), mul(t, r, slice(t, uh, 2 * H, H))));
  // h' = h + z * (n - h)
  return add(t, h, mul(t, z, sub(t, n, h)));
}

HyperMixer HyperMixer::create(ParamStore& store, const std::string& name, int state_dim, int agents, int hidden) {
  require(state_dim > 0 && agents > 0 && hidden > 0, "HyperMixer: dimensions must be positive");
  HyperMixer m;
  m.w1 = Dense::create(store, name + ".hyper_w1", state_dim, agents * hidden, Activation::Abs);
  m.b1 = Dense::create(store, name + ".hyper_b1", state_dim, hidden, Activation::Identity);
  m.w2 = Dense::create(store, name + ".hyper_w2", state_dim, hidden, Activation::Abs);
  m.b2a = Dense::create(store, name + ".hyper_b2a", state_dim, hidden, Activation::Relu);
  m.b2b = Dense::create(store, name + ".hyper_b2b", hidden, 1, Activation::Identity);
  m.state_dim = state_dim;
  m.agents = agents;
  m.hidden = hidden;
  return m;
}

Var HyperMixer::bias(Tape& t, Var s) const { return b2b(t, b2a(t, s)); }

Var HyperMixer::operator()(Tape& t, Var s, Var v) const {
  require(t.value(v).rows() == agents && t.value(v).cols() == 1, "HyperMixer: one local value per agent expected");
  Var W1 = reshape(t, w1(t, s), hidden, agents);
  Var u = elu(t, add(t, matmul(t, W1, v), b1(t, s)));
  return add(t, dot(t, w2(t, s), u), bias(t, s));
}

}  // namespace rismarl::ad
