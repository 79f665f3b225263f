// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "rismarl/ad/tape.hpp"

namespace rismarl::ad {

/// y = act(W x + b). Weights use fan-in uniform init, bias starts at zero.
struct Dense {
  Parameter* w = nullptr;
  Parameter* b = nullptr;
  Activation act = Activation::Identity;
  int in = 0;
  int out = 0;

  static Dense create(ParamStore& store, const std::string& name, int in, int out, Activation act);
  Var operator()(Tape& t, Var x) const;
};

/// Single GRU cell with stacked [update; reset; candidate] weights:
///   z = sig(Wz x + Uz h + bz), r = sig(Wr x + Ur h + br),
///   n = tanh(Wn x + bn + r * (Un h)), h' = (1 - z) * h + z * n.
struct Gru {
  Parameter* w = nullptr;  // 3H x in
  Parameter* u = nullptr;  // 3H x H
  Parameter* b = nullptr;  // 3H x 1
  int in = 0;
  int hidden = 0;

  static Gru create(ParamStore& store, const std::string& name, int in, int hidden);
  Var operator()(Tape& t, Var x, Var h) const;
};

/// Two-layer monotone mixer whose weights come from hypernetworks of the state s:
///   W1 = |H1(s)| (hidden x n), b1 = B1(s), u = elu(W1 v + b1),
///   w2 = |H2(s)|, b2 = B2b(relu(B2a(s))), V = w2 . u + b2.
struct HyperMixer {
  Dense w1, b1, w2, b2a, b2b;
  int state_dim = 0;
  int agents = 0;
  int hidden = 0;

  static HyperMixer create(ParamStore& store, const std::string& name, int state_dim, int agents, int hidden);
  Var operator()(Tape& t, Var s, Var v) const;
  /// State-dependent bias b2(s) alone.
  Var bias(Tape& t, Var s) const;
};

}  // namespace rismarl::ad
