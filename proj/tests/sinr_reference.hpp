// SPDX-License-Identifier: Apache-2.0
// Second, loop-by-loop transcription of the decoding SINRs and SIC flags, written
// without reusing any link-layer helper. Used to cross-check sinr_all.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "rismarl/link/link_layer.hpp"

namespace rismarl::testing {

struct ReferenceSinr {
  std::vector<double> sinr;
  std::vector<int> fail;
};

inline ReferenceSinr reference_sinr(const EffectiveChannels& h, const LinkLayerPlan& plan,
                                    const std::vector<double>& alpha, double sigma2) {
  const std::size_t M = plan.aps.size();
  ReferenceSinr out;
  out.sinr.assign(alpha.size(), 0.0);
  out.fail.assign(alpha.size(), 0);

  // |h^{m' -> u} V^{m'} w_{n'}^{m'}|^2
  auto gain = [&](std::size_t mp, std::size_t np, int u) {
    const CCol beam = plan.aps[mp].v * plan.aps[mp].w.col(static_cast<Eigen::Index>(np));
    cdouble acc(0, 0);
    for (Eigen::Index a = 0; a < beam.size(); ++a) acc += h[mp][u](a) * beam(a);
    return std::norm(acc);
  };
  auto power = [&](std::size_t mp, std::size_t np) {
    double p = 0;
    for (int u : plan.aps[mp].clusters[np]) p += alpha[u];
    return p;
  };
  auto inter = [&](std::size_t m, std::size_t n, int u) {
    double s = 0;
    for (std::size_t mp = 0; mp < M; ++mp)
      for (std::size_t np = 0; np < plan.aps[mp].clusters.size(); ++np) {
        if (mp == m && np == n) continue;
        s += gain(mp, np, u) * power(mp, np);
      }
    return s;
  };

  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < plan.aps[m].clusters.size(); ++n) {
      const auto& c = plan.aps[m].clusters[n];
      const int head = c[0];
      const double g1 = gain(m, n, head);
      const double i1 = inter(m, n, head);
      for (std::size_t k = 1; k < c.size(); ++k) {
        const int u = c[k];
        double earlier = 0;
        for (std::size_t kp = 0; kp < k; ++kp) earlier += alpha[c[kp]];
        const double gk = gain(m, n, u);
        const double own = gk * alpha[u] / (earlier * gk + inter(m, n, u) + sigma2);
        const double at_head = g1 * alpha[u] / (earlier * g1 + i1 + sigma2);
        out.sinr[u] = own;
        out.fail[u] = at_head < own ? 1 : 0;
      }
      double residual = 0;
      for (std::size_t k = 1; k < c.size(); ++k) residual += out.fail[c[k]] * g1 * alpha[c[k]];
      out.sinr[head] = g1 * alpha[head] / (residual + i1 + sigma2);
    }
  }
  return out;
}

}  // namespace rismarl::testing
