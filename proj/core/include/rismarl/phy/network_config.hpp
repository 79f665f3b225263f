// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rismarl {

/// Flat `key = value` configuration, one entry per line, `#` starts a comment.
/// Readers record which keys they consumed so that typos can be reported.
class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;

  /// Keys present in the file that no reader asked for.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  const std::string* find(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> consumed_;
};

/// Physical-layer and hardware parameters of the network.
struct NetworkConfig {
  // topology counts
  int num_aps = 3;              // M
  int num_ris = 2;              // J
  int se_users_per_ap = 4;      // K_S
  int iot_users_per_ap = 4;     // K_U
  int antennas = 32;            // N_A
  int rf_chains = 4;            // N_R
  int ris_elements = 20;        // L
  int ris_phase_bits = 1;       // b
  int analog_phase_bits = 3;    // B

  // radio
  double carrier_freq_hz = 0.3e12;
  double bandwidth_hz = 10e9;
  double absorption_coeff = 0.0033;   // k(f), 1/m
  double antenna_gain_dbi = 20.0;     // Omega, combined tx/rx gain applied to path amplitude
  bool sqrt_m_prefactor = false;      // multiply path amplitude by sqrt(M)
  double ris_element_gain_db = 10.0;  // per-link amplitude gain on AP-RIS and RIS-user links
  double noise_power_w = 1.380649e-23 * 290.0 * 10e9;
  int num_nlos_paths = 3;
  double roughness_sigma_m = 5e-5;
  double refractive_index_re = 1.922;
  double refractive_index_im = 0.0057;
  double los_decay_distance_m = 8.0;  // d_B
  double nlos_detour_min = 1.2;
  double nlos_detour_max = 2.0;

  // power, W
  double max_tx_power_w = 1.0;
  double p_baseband_w = 0.2;
  double p_rf_chain_w = 0.16;
  double p_phase_shifter_w = 0.02;
  double p_amplifier_w = 0.02;
  double p_device_w = 0.01;
  double p_ris_element_w = 0.005;  // P_RIS(b) at the configured resolution
  double pa_inefficiency = 2.5;    // xi_pa

  // geometry, m
  double room_x = 20.0;
  double room_y = 10.0;
  double room_z = 3.0;
  double user_height = 1.0;
  double ris_height = 1.5;
  double neighbor_distance = 12.0;

  std::uint64_t rng_seed = 1;

  int users_per_ap() const { return se_users_per_ap + iot_users_per_ap; }
  int total_users() const { return num_aps * users_per_ap(); }
  int subarray_size() const { return antennas / rf_chains; }
  int phase_levels() const { return 1 << ris_phase_bits; }
  double wavelength() const;
  /// Linear amplitude factor shared by every path (antenna gain and optional sqrt(M)).
  double path_amplitude_gain() const;
  double ris_link_amplitude_gain() const;
  /// P_AP = P_BB + N_R P_RF + N_A (P_PS + P_A).
  double ap_circuit_power() const;

  /// Throws InvalidArgument when a structural invariant is violated.
  void validate() const;

  static NetworkConfig from_key_values(const KeyValues& kv);
  void to_key_values(KeyValues& kv) const;
};

}  // namespace rismarl
