// SPDX-License-Identifier: Apache-2.0
#include "rismarl/phy/network_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "rismarl/common.hpp"

namespace rismarl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValues KeyValues::parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InvalidArgument("config line " + std::to_string(lineno) + ": empty key");
    kv.entries_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

const std::string* KeyValues::find(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  consumed_.insert(key);
  return &it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    double d = std::stod(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument(key);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': not a number: " + *v);
  }
}

std::int64_t KeyValues::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  try {
    std::size_t pos = 0;
    long long i = std::stoll(*v, &pos);
    if (pos != v->size()) throw std::invalid_argument(key);
    return i;
  } catch (const std::exception&) {
    throw InvalidArgument("config key '" + key + "': not an integer: " + *v);
  }
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw InvalidArgument("config key '" + key + "': not a boolean: " + *v);
}

std::string KeyValues::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  return v ? *v : fallback;
}

std::vector<double> KeyValues::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  std::string item;
  std::istringstream in(*v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("config key '" + key + "': bad list entry: " + item);
    }
  }
  return out;
}

std::vector<std::string> KeyValues::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (!consumed_.count(k)) out.push_back(k);
  return out;
}

double NetworkConfig::wavelength() const { return kSpeedOfLight / carrier_freq_hz; }

double NetworkConfig::path_amplitude_gain() const {
  // antenna gain in dBi read as a linear amplitude factor, matching the channel expression
  double g = std::pow(10.0, antenna_gain_dbi / 10.0);
  if (sqrt_m_prefactor) g *= std::sqrt(static_cast<double>(num_aps));
  return g;
}

double NetworkConfig::ris_link_amplitude_gain() const {
  return std::pow(10.0, ris_element_gain_db / 20.0);
}

double NetworkConfig::ap_circuit_power() const {
  return p_baseband_w + rf_chains * p_rf_chain_w + antennas * (p_phase_shifter_w + p_amplifier_w);
}

void NetworkConfig::validate() const {
  require(num_aps > 0, "num_aps must be positive");
  require(num_ris >= 0, "num_ris must be non-negative");
  require(se_users_per_ap > 0, "se_users_per_ap must be positive");
  require(iot_users_per_ap >= 0, "iot_users_per_ap must be non-negative");
  require(antennas > 0 && rf_chains > 0, "antennas and rf_chains must be positive");
  require(antennas % rf_chains == 0, "antennas must be a multiple of rf_chains");
  require(rf_chains == se_users_per_ap, "rf_chains must equal se_users_per_ap");
  require(ris_elements > 0, "ris_elements must be positive");
  require(ris_phase_bits >= 1 && ris_phase_bits <= 16, "ris_phase_bits must be in [1, 16]");
  require(analog_phase_bits >= 1 && analog_phase_bits <= 16, "analog_phase_bits must be in [1, 16]");
  require(carrier_freq_hz > 0 && bandwidth_hz > 0, "frequency and bandwidth must be positive");
  require(absorption_coeff >= 0, "absorption_coeff must be non-negative");
  require(noise_power_w > 0, "noise_power_w must be positive");
  require(num_nlos_paths >= 0, "num_nlos_paths must be non-negative");
  require(roughness_sigma_m >= 0, "roughness_sigma_m must be non-negative");
  require(los_decay_distance_m > 0, "los_decay_distance_m must be positive");
  require(nlos_detour_min >= 1.0 && nlos_detour_max >= nlos_detour_min, "bad NLoS detour range");
  for (double p : {max_tx_power_w, p_baseband_w, p_rf_chain_w, p_phase_shifter_w, p_amplifier_w,
                   p_device_w, p_ris_element_w, pa_inefficiency})
    require(p >= 0, "power constants must be non-negative");
  require(max_tx_power_w > 0, "max_tx_power_w must be positive");
  require(room_x > 0 && room_y > 0 && room_z > 0, "room dimensions must be positive");
  require(neighbor_distance >= 0, "neighbor_distance must be non-negative");
}

NetworkConfig NetworkConfig::from_key_values(const KeyValues& kv) {
  NetworkConfig c;
  auto i = [&](const char* k, int& v) { v = static_cast<int>(kv.get_int(k, v)); };
  auto d = [&](const char* k, double& v) { v = kv.get_double(k, v); };
  i("num_aps", c.num_aps);
  i("num_ris", c.num_ris);
  i("se_users_per_ap", c.se_users_per_ap);
  i("iot_users_per_ap", c.iot_users_per_ap);
  i("antennas", c.antennas);
  i("rf_chains", c.rf_chains);
  i("ris_elements", c.ris_elements);
  i("ris_phase_bits", c.ris_phase_bits);
  i("analog_phase_bits", c.analog_phase_bits);
  d("carrier_freq_hz", c.carrier_freq_hz);
  d("bandwidth_hz", c.bandwidth_hz);
  d("absorption_coeff", c.absorption_coeff);
  d("antenna_gain_dbi", c.antenna_gain_dbi);
  c.sqrt_m_prefactor = kv.get_bool("sqrt_m_prefactor", c.sqrt_m_prefactor);
  d("ris_element_gain_db", c.ris_element_gain_db);
  d("noise_power_w", c.noise_power_w);
  i("num_nlos_paths", c.num_nlos_paths);
  d("roughness_sigma_m", c.roughness_sigma_m);
  d("refractive_index_re", c.refractive_index_re);
  d("refractive_index_im", c.refractive_index_im);
  d("los_decay_distance_m", c.los_decay_distance_m);
  d("nlos_detour_min", c.nlos_detour_min);
  d("nlos_detour_max", c.nlos_detour_max);
  d("max_tx_power_w", c.max_tx_power_w);
  d("p_baseband_w", c.p_baseband_w);
  d("p_rf_chain_w", c.p_rf_chain_w);
  d("p_phase_shifter_w", c.p_phase_shifter_w);
  d("p_amplifier_w", c.p_amplifier_w);
  d("p_device_w", c.p_device_w);
  d("p_ris_element_w", c.p_ris_element_w);
  d("pa_inefficiency", c.pa_inefficiency);
  d("room_x", c.room_x);
  d("room_y", c.room_y);
  d("room_z", c.room_z);
  d("user_height", c.user_height);
  d("ris_height", c.ris_height);
  d("neighbor_distance", c.neighbor_distance);
  c.rng_seed = static_cast<std::uint64_t>(kv.get_int("rng_seed", static_cast<std::int64_t>(c.rng_seed)));
  c.validate();
  return c;
}

void NetworkConfig::to_key_values(KeyValues& kv) const {
  auto put = [&](const char* k, double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    kv.set(k, os.str());
  };
  put("num_aps", num_aps);
  put("num_ris", num_ris);
  put("se_users_per_ap", se_users_per_ap);
  put("iot_users_per_ap", iot_users_per_ap);
  put("antennas", antennas);
  put("rf_chains", rf_chains);
  put("ris_elements", ris_elements);
  put("ris_phase_bits", ris_phase_bits);
  put("analog_phase_bits", analog_phase_bits);
  put("carrier_freq_hz", carrier_freq_hz);
  put("bandwidth_hz", bandwidth_hz);
  put("absorption_coeff", absorption_coeff);
  put("antenna_gain_dbi", antenna_gain_dbi);
  kv.set("sqrt_m_prefactor", sqrt_m_prefactor ? "true" : "false");
  put("ris_element_gain_db", ris_element_gain_db);
  put("noise_power_w", noise_power_w);
  put("num_nlos_paths", num_nlos_paths);
  put("roughness_sigma_m", roughness_sigma_m);
  put("refractive_index_re", refractive_index_re);
  put("refractive_index_im", refractive_index_im);
  put("los_decay_distance_m", los_decay_distance_m);
  put("nlos_detour_min", nlos_detour_min);
  put("nlos_detour_max", nlos_detour_max);
  put("max_tx_power_w", max_tx_power_w);
  put("p_baseband_w", p_baseband_w);
  put("p_rf_chain_w", p_rf_chain_w);
  put("p_phase_shifter_w", p_phase_shifter_w);
  put("p_amplifier_w", p_amplifier_w);
  put("p_device_w", p_device_w);
  put("p_ris_element_w", p_ris_element_w);
  put("pa_inefficiency", pa_inefficiency);
  put("room_x", room_x);
  put("room_y", room_y);
  put("room_z", room_z);
  put("user_height", user_height);
  put("ris_height", ris_height);
  put("neighbor_distance", neighbor_distance);
  kv.set("rng_seed", std::to_string(rng_seed));
}

}  // namespace rismarl
