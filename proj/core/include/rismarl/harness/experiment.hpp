// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rismarl/env/environment.hpp"
#include "rismarl/learn/trainer.hpp"

namespace rismarl {

/// Names accepted by `algorithm`.
const std::vector<std::string>& algorithm_names();
bool is_learner(const std::string& algorithm);

/// Everything one run needs. Built from a flat key-value file; unknown keys are rejected.
struct ExperimentConfig {
  NetworkConfig net;
  EnvConfig env;
  LearnerConfig learner;
  std::string algorithm = "gevdac";
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "runs";
  int oracle_episodes = 1;  // greedy test episodes whose states the oracle scores

  void validate() const;
  static ExperimentConfig from_key_values(const KeyValues& kv);
  KeyValues to_key_values() const;
};

/// Reads `path`, or the file named by RISMARL_CONFIG when `path` is empty, or
/// defaults when neither is given. `overrides` are `key=value` strings applied last.
KeyValues load_config_values(const std::string& path, const std::vector<std::string>& overrides);

/// Applies one sweep parameter. `K` sets users per AP by changing the IoT count.
void apply_parameter(KeyValues& kv, const std::string& param, const std::string& value);

struct RunSummary {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::uint64_t env_checksum = 0;
  CurveRow final_row;
  double oracle_mean = 0;  // oracle runs only
  double policy_mean = 0;
};

/// Runs one (algorithm, seed) and writes steps.jsonl, curve.csv, episodes.csv, run.json
/// and, for learners, theta.ckpt and mu.ckpt into `dir`.
RunSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& dir);

/// Greedy test episodes of a saved learner; returns the episode summary.
EpisodeSummary evaluate_checkpoint(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::filesystem::path& run_dir, int episodes);

struct SweepSpec {
  std::string param;               // empty: no parameter axis
  std::vector<std::string> values;
  std::vector<std::string> algorithms;
  std::vector<std::uint64_t> seeds;
};

std::string sweep_csv_header();

/// Every (value, algorithm, seed) combination; writes `out/sweep.csv` and one run
/// directory per combination. Returns the rows written.
std::vector<std::string> run_sweep(const KeyValues& base, const SweepSpec& spec, const std::filesystem::path& out);

/// Tidy CSV for one figure axis. `reward-vs-step` reads every curve.csv under `input`;
/// `<ee|reliability|reward>-vs-<K|NA|J|zeta>` reads `input/sweep.csv`.
void plot_data(const std::string& metric, const std::filesystem::path& input, std::ostream& out);

}  // namespace rismarl
