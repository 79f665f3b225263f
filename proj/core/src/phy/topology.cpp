// SPDX-License-Identifier: Apache-2.0
#include "rismarl/phy/topology.hpp"

#include <cmath>
#include <ostream>

namespace rismarl {

double distance(const Point3& a, const Point3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

Topology build_topology(const NetworkConfig& config, Rng& rng) {
  require(config.num_aps > 0 && config.users_per_ap() > 0, "topology counts must be positive");
  require(config.room_x > 0 && config.room_y > 0 && config.room_z > 0, "room has zero size");
  Topology t;
  const int M = config.num_aps, J = config.num_ris, K = config.users_per_ap();
  const double cell = config.room_x / M;
  for (int m = 0; m < M; ++m) t.ap_positions.push_back({(m + 0.5) * cell, config.room_y / 2, config.room_z});
  for (int j = 0; j < J; ++j) {
    const double y = (j % 2 == 0) ? 0.0 : config.room_y;
    t.ris_positions.push_back({(j + 0.5) * config.room_x / J, y, config.ris_height});
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < K; ++k) {
      const double x = (m + unit(rng)) * cell;
      const double y = unit(rng) * config.room_y;
      t.user_positions.push_back({x, y, config.user_height});
      t.user_kind.push_back(k < config.se_users_per_ap ? UserKind::SE : UserKind::IoT);
      t.ap_of_user.push_back(m);
    }
  }
  t.ap_ris_neighbors.assign(M, {});
  t.ap_ap_neighbors.assign(M, {});
  t.ris_ap_neighbors.assign(J, {});
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < J; ++j) {
      if (distance(t.ap_positions[m], t.ris_positions[j]) <= config.neighbor_distance) {
        t.ap_ris_neighbors[m].push_back(j);
        t.ris_ap_neighbors[j].push_back(m);
      }
    }
    for (int o = 0; o < M; ++o)
      if (o != m && distance(t.ap_positions[m], t.ap_positions[o]) <= config.neighbor_distance)
        t.ap_ap_neighbors[m].push_back(o);
  }
  return t;
}

std::uint64_t Topology::hash() const {
  std::uint64_t h = fnv1a("topology");
  auto pts = [&](const std::vector<Point3>& v) {
    for (const auto& p : v) h = fnv1a(p.data(), sizeof(double) * 3, h);
  };
  auto lists = [&](const std::vector<std::vector<int>>& v) {
    for (const auto& l : v) {
      const auto n = static_cast<std::uint64_t>(l.size());
      h = fnv1a(&n, sizeof n, h);
      if (!l.empty()) h = fnv1a(l.data(), sizeof(int) * l.size(), h);
    }
  };
  pts(ap_positions);
  pts(ris_positions);
  pts(user_positions);
  for (auto k : user_kind) {
    const int v = k == UserKind::SE ? 0 : 1;
    h = fnv1a(&v, sizeof v, h);
  }
  if (!ap_of_user.empty()) h = fnv1a(ap_of_user.data(), sizeof(int) * ap_of_user.size(), h);
  lists(ap_ris_neighbors);
  lists(ap_ap_neighbors);
  lists(ris_ap_neighbors);
  return h;
}

void Topology::dump(std::ostream& os) const {
  auto pt = [&](const Point3& p) { os << p[0] << ' ' << p[1] << ' ' << p[2]; };
  auto list = [&](const std::vector<int>& l) {
    os << '[';
    for (std::size_t i = 0; i < l.size(); ++i) os << (i ? " " : "") << l[i];
    os << ']';
  };
  for (int m = 0; m < num_aps(); ++m) {
    os << "ap " << m << " pos ";
    pt(ap_positions[m]);
    os << " ris ";
    list(ap_ris_neighbors[m]);
    os << " aps ";
    list(ap_ap_neighbors[m]);
    os << '\n';
  }
  for (int j = 0; j < num_ris(); ++j) {
    os << "ris " << j << " pos ";
    pt(ris_positions[j]);
    os << " aps ";
    list(ris_ap_neighbors[j]);
    os << '\n';
  }
  for (int u = 0; u < num_users(); ++u) {
    os << "user " << u << " ap " << ap_of_user[u] << " kind "
       << (user_kind[u] == UserKind::SE ? "se" : "iot") << " pos ";
    pt(user_positions[u]);
    os << '\n';
  }
}

}  // namespace rismarl
