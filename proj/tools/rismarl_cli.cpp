// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "rismarl/harness/cli.hpp"

int main(int argc, char** argv) { return rismarl::cli_main(argc, argv, std::cout, std::cerr); }
