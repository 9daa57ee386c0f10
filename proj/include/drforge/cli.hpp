// Copyright 2026 The drforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drforge {

// Exit statuses of the command-line interface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // runtime failure; JSON error on stderr
inline constexpr int kExitUsage = 2;    // unknown subcommand, flag or bad value

// Runs one command line (without the program name). Results go to `out`,
// log lines and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace drforge
