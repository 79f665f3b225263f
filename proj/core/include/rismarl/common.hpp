// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rismarl {

using cdouble = std::complex<double>;
using CRow = Eigen::RowVectorXcd;
using CCol = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// All stochastic components draw from an explicit, caller-owned stream.
using Rng = std::mt19937_64;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

/// FNV-1a, used wherever a hash has to be stable across runs and builds.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                           std::uint64_t h = 1469598103934665603ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s,
                           std::uint64_t h = 1469598103934665603ULL) {
  return fnv1a(s.data(), s.size(), h);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a label.
inline std::uint64_t derive_seed(std::uint64_t base, const std::string& label) {
  return splitmix64(fnv1a(label, splitmix64(base)));
}

}  // namespace rismarl
