/*
 * Copyright (c) 2026 The epdlab authors
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include <iostream>

#include "epdlab/cli.hpp"

int main(int argc, char** argv) {
    return epdlab::cli::run_cli(argc, argv, std::cout, std::cerr);
}
