// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace rismarl {

/// Queue quantities are in units of 1 Gbps x one slot; rates are in Gbps.
struct QueueState {
  std::vector<double> q;  // traffic backlog
  std::vector<double> y;  // virtual queue for the outage constraint
};

/// q' = A + max(q - served, 0).
double update_queue(double q, double served, double arrival);

/// Y' = max(Y + q' - q_max * eps, 0).
double update_virtual_queue(double y, double q_next, double q_max, double eps);

struct DriftTerms {
  double c = 0;       // constant term
  double b = 0;       // state-dependent term
  double lambda = 0;  // weight on (A - R), Y + 2q
};

/// Per-user drift bound components with arrival cap `a_max` and rate cap `r_max`.
DriftTerms drift_terms(double q, double y, double arrival, double a_max, double r_max, double q_max, double eps);

/// Quadratic Lyapunov function of one user's (q, Y).
double lyapunov(double q, double y);

/// Sum of rate shortfalls below the per-user minimum, same units as the inputs.
double rate_violation(const std::vector<double>& rates, const std::vector<double>& minima);

/// zeta * eta - xi * delta + sum_u lambda_u * rate_u.
double reward(double eta, double delta, const std::vector<double>& lambda, const std::vector<double>& rates,
              double zeta, double xi);

struct OutageStats {
  std::vector<double> empirical;     // fraction of slots with q >= q_max
  std::vector<double> markov_bound;  // mean(q) / q_max
};

/// `history[t][u]` is the backlog of user u after slot t.
OutageStats outage_stats(const std::vector<std::vector<double>>& history, const std::vector<double>& q_max);

}  // namespace rismarl
