// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace rismarl {

/// Entry point of the `rismarl` tool: train, eval, oracle, sweep, plot-data.
/// Returns the process exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rismarl
