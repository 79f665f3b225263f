// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rismarl/env/environment.hpp"
#include "rismarl/learn/trainer.hpp"

namespace rismarl {

/// Non-learning MIMO-NOMA without RIS: every element off, equal power.
enum class NoRisKind {
  Csi,  // cluster heads are the strongest channels
  Qos,  // cluster heads are the SE users
};

NoRisKind parse_no_ris_kind(const std::string& name);

JointAction equal_power_no_ris(const Environment& env);
StepOptions no_ris_options(NoRisKind kind);

/// Plays `episodes` training-stream episodes and the greedy test stream with the
/// same environment seeds a learner with this seed would use. Gradient columns are zero.
std::vector<CurveRow> run_no_ris_benchmark(const NetworkConfig& net, const EnvConfig& env, NoRisKind kind,
                                           int episodes, int eval_episodes, std::uint64_t seed,
                                           const TrainerSinks& sinks = {});

}  // namespace rismarl
