// SPDX-License-Identifier: Apache-2.0
#include "rismarl/env/queues.hpp"

#include <algorithm>

#include "rismarl/common.hpp"

namespace rismarl {

double update_queue(double q, double served, double arrival) {
  require(q >= 0 && served >= 0 && arrival >= 0, "update_queue: inputs must be non-negative");
  return arrival + std::max(q - served, 0.0);
}

double update_virtual_queue(double y, double q_next, double q_max, double eps) {
  require(y >= 0 && q_next >= 0, "update_virtual_queue: inputs must be non-negative");
  return std::max(y + q_next - q_max * eps, 0.0);
}

DriftTerms drift_terms(double q, double y, double arrival, double a_max, double r_max, double q_max, double eps) {
  const double cq = 0.5 * a_max * a_max + 0.5 * r_max * r_max;
  const double qe = q_max * eps;
  const double cy = 0.5 * qe * qe;
  DriftTerms d;
  d.c = 2.0 * cq + cy;
  d.b = 0.5 * q * q + y * (arrival + q);
  d.lambda = y + 2.0 * q;
  return d;
}

double lyapunov(double q, double y) { return 0.5 * (q * q + y * y); }

double rate_violation(const std::vector<double>& rates, const std::vector<double>& minima) {
  require(rates.size() == minima.size(), "rate_violation: size mismatch");
  double s = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) s += std::max(minima[i] - rates[i], 0.0);
  return s;
}

double reward(double eta, double delta, const std::vector<double>& lambda, const std::vector<double>& rates,
              double zeta, double xi) {
  require(lambda.size() == rates.size(), "reward: size mismatch");
  double bonus = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) bonus += lambda[i] * rates[i];
  return zeta * eta - xi * delta + bonus;
}

OutageStats outage_stats(const std::vector<std::vector<double>>& history, const std::vector<double>& q_max) {
  require(!history.empty(), "outage_stats: empty history");
  const std::size_t U = q_max.size();
  OutageStats s;
  s.empirical.assign(U, 0.0);
  s.markov_bound.assign(U, 0.0);
  for (const auto& row : history) {
    require(row.size() == U, "outage_stats: ragged history");
    for (std::size_t u = 0; u < U; ++u) {
      if (row[u] >= q_max[u]) s.empirical[u] += 1.0;
      s.markov_bound[u] += row[u];
    }
  }
  const double T = static_cast<double>(history.size());
  for (std::size_t u = 0; u < U; ++u) {
    s.empirical[u] /= T;
    s.markov_bound[u] /= T * q_max[u];
  }
  return s;
}

}  // namespace rismarl
