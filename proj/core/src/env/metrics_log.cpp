// SPDX-License-Identifier: Apache-2.0
#include "rismarl/env/metrics_log.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace rismarl {

std::string step_record_json(int episode, const StepOutcome& s, double exchange_volume) {
  nlohmann::json j;
  j["episode"] = episode;
  j["t"] = s.t;
  j["r"] = s.reward;
  j["eta"] = s.eta;
  j["delta"] = s.delta;
  j["power_w"] = s.power_w;
  j["rate_gbps"] = s.rates_gbps;
  j["lambda"] = s.lambda;
  j["q"] = s.q;
  j["Y"] = s.y;
  j["outage"] = s.outage;
  j["exchange"] = exchange_volume;
  return j.dump();
}

std::string EpisodeSummary::csv_header() {
  return "episode,steps,mean_reward,mean_eta,mean_sum_rate_gbps,mean_power_w,mean_delta,se_reliability,"
         "iot_reliability,mean_q,exchange_volume";
}

std::string EpisodeSummary::csv_row() const {
  std::ostringstream os;
  os.precision(17);
  os << episode << ',' << steps << ',' << mean_reward << ',' << mean_eta << ',' << mean_sum_rate_gbps << ','
     << mean_power_w << ',' << mean_delta << ',' << se_reliability << ',' << iot_reliability << ',' << mean_q
     << ',' << exchange_volume;
  return os.str();
}

EpisodeAccumulator::EpisodeAccumulator(int episode, const std::vector<UserKind>& kinds) : kinds_(kinds) {
  sum_.episode = episode;
}

void EpisodeAccumulator::add(const StepOutcome& s, double exchange_volume) {
  ++sum_.steps;
  sum_.mean_reward += s.reward;
  sum_.mean_eta += s.eta;
  sum_.mean_sum_rate_gbps += s.sum_rate_gbps;
  sum_.mean_power_w += s.power_w;
  sum_.mean_delta += s.delta;
  sum_.exchange_volume += exchange_volume;
  for (std::size_t u = 0; u < kinds_.size(); ++u) {
    const bool out = u < s.outage.size() && s.outage[u];
    if (kinds_[u] == UserKind::SE) {
      se_slots_ += 1;
      se_out_ += out;
    } else {
      iot_slots_ += 1;
      iot_out_ += out;
    }
    if (u < s.q.size()) q_total_ += s.q[u];
  }
}

EpisodeSummary EpisodeAccumulator::summary() const {
  EpisodeSummary e = sum_;
  const double n = std::max(1, e.steps);
  e.mean_reward /= n;
  e.mean_eta /= n;
  e.mean_sum_rate_gbps /= n;
  e.mean_power_w /= n;
  e.mean_delta /= n;
  e.exchange_volume /= n;
  e.se_reliability = se_slots_ > 0 ? 1.0 - se_out_ / se_slots_ : 1.0;
  e.iot_reliability = iot_slots_ > 0 ? 1.0 - iot_out_ / iot_slots_ : 1.0;
  e.mean_q = kinds_.empty() ? 0.0 : q_total_ / (n * static_cast<double>(kinds_.size()));
  return e;
}

LineWriter::LineWriter(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::out | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

void LineWriter::write(const std::string& line) {
  if (out_.is_open()) out_ << line << '\n';
}

}  // namespace rismarl
