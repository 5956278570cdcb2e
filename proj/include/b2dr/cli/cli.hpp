// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>

namespace b2dr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Entry point of the b2dr command. Results go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace b2dr
