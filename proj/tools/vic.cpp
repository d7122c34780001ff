// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/cli.hpp"

int main(int argc, char** argv) { return vic::cli::main(argc, argv); }
