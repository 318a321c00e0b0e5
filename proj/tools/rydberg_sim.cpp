// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "rydberg/cli.hpp"

int main(int argc, char** argv) { return rydberg::cli::run(argc, argv, std::cout, std::cerr); }
