// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace rismarl {

/// TD advantage r + gamma V(s') - V(s).
double advantage(double reward, double v, double v_next, double gamma);

/// rewards[t] is the reward of the transition out of s_t; values has one more entry
/// than rewards (bootstrap for the final state). Sums min(n, T - t) discounted
/// rewards and bootstraps from the value where the window ends.
double n_step_return(const std::vector<double>& rewards, const std::vector<double>& values, int t, int n,
                     double gamma);

std::vector<double> n_step_returns(const std::vector<double>& rewards, const std::vector<double>& values, int n,
                                   double gamma);

}  // namespace rismarl
