// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rismarl/common.hpp"
#include "rismarl/phy/network_config.hpp"

namespace rismarl {

using Point3 = std::array<double, 3>;

double distance(const Point3& a, const Point3& b);

enum class UserKind { SE, IoT };

/// Node placement and neighbor relations. Users are indexed globally as
/// ap * users_per_ap + k, SE users first within each AP.
struct Topology {
  std::vector<Point3> ap_positions;
  std::vector<Point3> ris_positions;
  std::vector<Point3> user_positions;
  std::vector<UserKind> user_kind;
  std::vector<int> ap_of_user;
  std::vector<std::vector<int>> ap_ris_neighbors;  // RIS neighbors of each AP
  std::vector<std::vector<int>> ap_ap_neighbors;   // AP neighbors of each AP (excluding itself)
  std::vector<std::vector<int>> ris_ap_neighbors;  // AP neighbors of each RIS

  int num_aps() const { return static_cast<int>(ap_positions.size()); }
  int num_ris() const { return static_cast<int>(ris_positions.size()); }
  int num_users() const { return static_cast<int>(user_positions.size()); }

  /// Stable hash of every coordinate and neighbor list.
  std::uint64_t hash() const;
  /// Human-readable dump, one record per line.
  void dump(std::ostream& os) const;
};

/// APs on the ceiling along the room's x axis, RIS panels alternating between
/// the two long walls, users uniform inside their AP's x-cell.
Topology build_topology(const NetworkConfig& config, Rng& rng);

}  // namespace rismarl
