// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rismarl/env/environment.hpp"

namespace rismarl {

/// One JSON object per slot: t, r, eta, delta, per-user rate, q, Y, outage.
std::string step_record_json(int episode, const StepOutcome& s, double exchange_volume);

/// Aggregates of one episode, identical schema for every learner.
struct EpisodeSummary {
  int episode = 0;
  int steps = 0;
  double mean_reward = 0;
  double mean_eta = 0;
  double mean_sum_rate_gbps = 0;
  double mean_power_w = 0;
  double mean_delta = 0;
  double se_reliability = 0;   // 1 - fraction of SE user-slots in outage
  double iot_reliability = 0;
  double mean_q = 0;
  double exchange_volume = 0;  // scalars exchanged per slot

  static std::string csv_header();
  std::string csv_row() const;
};

/// Running accumulator producing an EpisodeSummary.
class EpisodeAccumulator {
 public:
  EpisodeAccumulator(int episode, const std::vector<UserKind>& kinds);
  void add(const StepOutcome& s, double exchange_volume);
  EpisodeSummary summary() const;

 private:
  EpisodeSummary sum_;
  std::vector<UserKind> kinds_;
  double se_slots_ = 0, se_out_ = 0, iot_slots_ = 0, iot_out_ = 0, q_total_ = 0;
};

/// Appends lines to a file, creating parent directories. A default-constructed
/// writer discards everything.
class LineWriter {
 public:
  LineWriter() = default;
  explicit LineWriter(const std::filesystem::path& path);
  void write(const std::string& line);
  bool enabled() const { return out_.is_open(); }

 private:
  std::ofstream out_;
};

}  // namespace rismarl
