// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace rismarl::ad {

using Mat = Eigen::MatrixXd;

enum class InitScheme : std::uint8_t { UniformFanIn = 0, Zeros = 1, Constant = 2 };

/// Named trainable tensor with the metadata needed to recreate its initial value.
struct Parameter {
  std::string name;
  Mat value;
  Mat grad;
  InitScheme scheme = InitScheme::Zeros;
  double init_arg = 0;  // fan-in or constant
  std::uint64_t seed = 0;
};

/// Insertion-ordered parameter collection. Pointers stay valid for the store's lifetime.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t base_seed = 0) : base_seed_(base_seed) {}
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;
  ParamStore(ParamStore&&) = default;
  ParamStore& operator=(ParamStore&&) = default;

  /// UniformFanIn draws from U(-1/sqrt(arg), 1/sqrt(arg)) with a seed derived from the name.
  Parameter& add(const std::string& name, int rows, int cols, InitScheme scheme, double arg = 0);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const { return params_.size(); }
  Parameter& at(std::size_t i) { return *params_[i]; }
  const Parameter& at(std::size_t i) const { return *params_[i]; }
  std::size_t num_scalars() const;
  std::uint64_t base_seed() const { return base_seed_; }

  void zero_grad();
  /// Copies every value from a store with identical names and shapes.
  void copy_values_from(const ParamStore& other);

 private:
  std::uint64_t base_seed_;
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Gradient snapshot aligned with a store's parameter order.
using GradBuffer = std::vector<Mat>;

GradBuffer zeros_like(const ParamStore& store);
/// buffer += current gradients of the store.
void accumulate_grads(GradBuffer& buffer, const ParamStore& store);
double grad_norm(const GradBuffer& buffer);

/// theta <- theta + kappa_pi * g_pi - kappa_v * g_v. Throws on a non-finite gradient.
void sgd_update(ParamStore& store, const GradBuffer& g_pi, double kappa_pi, const GradBuffer& g_v, double kappa_v);
/// mu <- mu - kappa * g. Throws on a non-finite gradient.
void sgd_descent(ParamStore& store, const GradBuffer& g, double kappa);

}  // namespace rismarl::ad
