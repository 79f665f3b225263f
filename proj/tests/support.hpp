// SPDX-License-Identifier: Apache-2.0
// Shared helpers for the unit and acceptance tests.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "rismarl/ad/param_store.hpp"
#include "rismarl/ad/tape.hpp"
#include "rismarl/common.hpp"

namespace rismarl::testing {

inline CRow random_row(int n, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  CRow r(n);
  for (int i = 0; i < n; ++i) r(i) = cdouble(g(rng), g(rng));
  return r;
}

inline Eigen::MatrixXd random_mat(int rows, int cols, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

/// Randomizes every parameter of a store from N(0, scale^2).
inline void randomize(ad::ParamStore& store, Rng& rng, double scale = 0.5) {
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& p = store.at(i);
    p.value = random_mat(static_cast<int>(p.value.rows()), static_cast<int>(p.value.cols()), rng, scale);
  }
}

struct GradCheck {
  double worst_rel = 0;   // max over parameters of |g_a - g_n| / max(|g_a|, |g_n|, floor)
  std::string worst_name;
  double analytic_norm = 0;
};

/// Central differences of a scalar loss built on a fresh tape, against backward(),
/// for every parameter of every store. Error is measured per parameter tensor.
inline GradCheck check_gradients(const std::vector<ad::ParamStore*>& stores,
                                 const std::function<ad::Var(ad::Tape&)>& loss, double step = 1e-5,
                                 double floor = 1e-7) {
  for (auto* s : stores) s->zero_grad();
  {
    ad::Tape t;
    t.backward(loss(t));
  }
  auto eval = [&] {
    ad::Tape t;
    return t.scalar(loss(t));
  };
  GradCheck out;
  for (auto* s : stores) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      auto& p = s->at(i);
      const Eigen::MatrixXd analytic = p.grad;
      Eigen::MatrixXd numeric(p.value.rows(), p.value.cols());
      for (Eigen::Index k = 0; k < p.value.size(); ++k) {
        const double orig = p.value.data()[k];
        p.value.data()[k] = orig + step;
        const double up = eval();
        p.value.data()[k] = orig - step;
        const double down = eval();
        p.value.data()[k] = orig;
        numeric.data()[k] = (up - down) / (2 * step);
      }
      const double denom = std::max({analytic.norm(), numeric.norm(), floor});
      const double rel = (analytic - numeric).norm() / denom;
      out.analytic_norm += analytic.squaredNorm();
      if (rel > out.worst_rel) {
        out.worst_rel = rel;
        out.worst_name = p.name;
      }
    }
  }
  out.analytic_norm = std::sqrt(out.analytic_norm);
  return out;
}

}  // namespace rismarl::testing
