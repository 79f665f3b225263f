// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "rismarl/ad/param_store.hpp"

namespace rismarl::ad {

/// Binary named-tensor file: header (magic, version, base seed, count), then per tensor
/// name, init scheme, init argument, seed, rows, cols and raw column-major doubles.
void save_checkpoint(const ParamStore& store, const std::string& path);

/// Builds a fresh store from a checkpoint, values bit-exact.
ParamStore read_checkpoint(const std::string& path);

/// Overwrites values of an existing store. Names, order and shapes must match.
void load_checkpoint(ParamStore& store, const std::string& path);

}  // namespace rismarl::ad
