// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "b2dr/cli/cli.hpp"

int main(int argc, char** argv) { return b2dr::run_cli(argc, argv, std::cout, std::cerr); }
