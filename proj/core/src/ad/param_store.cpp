// SPDX-License-Identifier: Apache-2.0
#include "rismarl/ad/param_store.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rismarl/common.hpp"

namespace rismarl::ad {

Parameter& ParamStore::add(const std::string& name, int rows, int cols, InitScheme scheme, double arg) {
  require(!contains(name), "ParamStore: duplicate parameter " + name);
  require(rows > 0 && cols > 0, "ParamStore: empty parameter " + name);
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->scheme = scheme;
  p->init_arg = arg;
  p->seed = derive_seed(base_seed_, name);
  p->grad = Mat::Zero(rows, cols);
  switch (scheme) {
    case InitScheme::UniformFanIn: {
      require(arg > 0, "ParamStore: fan-in must be positive for " + name);
      const double bound = 1.0 / std::sqrt(arg);
      Rng rng(p->seed);
      std::uniform_real_distribution<double> u(-bound, bound);
      p->value.resize(rows, cols);
      for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) p->value(r, c) = u(rng);
      break;
    }
    case InitScheme::Zeros:
      p->value = Mat::Zero(rows, cols);
      break;
    case InitScheme::Constant:
      p->value = Mat::Constant(rows, cols, arg);
      break;
  }
  index_[name] = params_.size();
  params_.push_back(std::move(p));
  return *params_.back();
}

Parameter& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  require(it != index_.end(), "ParamStore: no parameter " + name);
  return *params_[it->second];
}

const Parameter& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  require(it != index_.end(), "ParamStore: no parameter " + name);
  return *params_[it->second];
}

std::size_t ParamStore::num_scalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p->grad.setZero();
}

void ParamStore::copy_values_from(const ParamStore& other) {
  require(other.size() == size(), "ParamStore::copy_values_from: size mismatch");
  for (std::size_t i = 0; i < size(); ++i) {
    require(other.at(i).name == at(i).name && other.at(i).value.rows() == at(i).value.rows() &&
                other.at(i).value.cols() == at(i).value.cols(),
            "ParamStore::copy_values_from: layout mismatch at " + at(i).name);
    at(i).value = other.at(i).value;
  }
}

GradBuffer zeros_like(const ParamStore& store) {
  GradBuffer g;
  g.reserve(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) g.push_back(Mat::Zero(store.at(i).value.rows(), store.at(i).value.cols()));
  return g;
}

void accumulate_grads(GradBuffer& buffer, const ParamStore& store) {
  require(buffer.size() == store.size(), "accumulate_grads: buffer does not match store");
  for (std::size_t i = 0; i < store.size(); ++i) buffer[i] += store.at(i).grad;
}

double grad_norm(const GradBuffer& buffer) {
  double s = 0;
  for (const auto& g : buffer) s += g.squaredNorm();
  return std::sqrt(s);
}

namespace {

void check_finite(const ParamStore& store, const GradBuffer& g) {
  require(g.size() == store.size(), "sgd: gradient buffer does not match store");
  for (std::size_t i = 0; i < g.size(); ++i) {
    require(g[i].rows() == store.at(i).value.rows() && g[i].cols() == store.at(i).value.cols(),
            "sgd: gradient shape mismatch for " + store.at(i).name);
    if (!g[i].allFinite()) throw std::runtime_error("non-finite gradient in parameter " + store.at(i).name);
  }
}

}  // namespace

void sgd_update(ParamStore& store, const GradBuffer& g_pi, double kappa_pi, const GradBuffer& g_v, double kappa_v) {
  check_finite(store, g_pi);
  check_finite(store, g_v);
  for (std::size_t i = 0; i < store.size(); ++i) store.at(i).value += kappa_pi * g_pi[i] - kappa_v * g_v[i];
}

void sgd_descent(ParamStore& store, const GradBuffer& g, double kappa) {
  check_finite(store, g);
  for (std::size_t i = 0; i < store.size(); ++i) store.at(i).value -= kappa * g[i];
}

}  // namespace rismarl::ad
