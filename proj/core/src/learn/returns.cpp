// SPDX-License-Identifier: Apache-2.0
#include "rismarl/learn/returns.hpp"

#include <algorithm>

#include "rismarl/common.hpp"

namespace rismarl {

double advantage(double reward, double v, double v_next, double gamma) {
  require(gamma >= 0 && gamma < 1, "advantage: gamma must lie in [0, 1)");
  return reward + gamma * v_next - v;
}

double n_step_return(const std::vector<double>& rewards, const std::vector<double>& values, int t, int n,
                     double gamma) {
  const int T = static_cast<int>(rewards.size());
  require(values.size() == rewards.size() + 1, "n_step_return: values need a bootstrap entry");
  require(t >= 0 && t < T && n >= 1, "n_step_return: bad window");
  require(gamma >= 0 && gamma < 1, "n_step_return: gamma must lie in [0, 1)");
  const int m = std::min(n, T - t);
  double g = 0, w = 1;
  for (int i = 0; i < m; ++i) {
    g += w * rewards[t + i];
    w *= gamma;
  }
  return g + w * values[t + m];
}

std::vector<double> n_step_returns(const std::vector<double>& rewards, const std::vector<double>& values, int n,
                                   double gamma) {
  std::vector<double> out(rewards.size());
  for (std::size_t t = 0; t < rewards.size(); ++t) out[t] = n_step_return(rewards, values, static_cast<int>(t), n, gamma);
  return out;
}

}  // namespace rismarl
