// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <spdlog/spdlog.h>

namespace b2dr {

/// Applies the B2DR_LOG environment variable (debug|info|warn) to the default
/// logger. Unset or unrecognized values leave the level at warn.
void configure_logging_from_env();

}  // namespace b2dr
