// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "b2dr/behavior/idm.hpp"
#include "b2dr/behavior/lead.hpp"
#include "b2dr/scenario/types.hpp"

namespace b2dr {

/// Advances every dynamic agent by one IDM tick (semi-implicit Euler along its
/// route). Leads are selected against the input snapshot, so the result does
/// not depend on agent order. The ego is left untouched; tick increments.
WorldState step_agents(const WorldState& world, double dt, const IdmTable& params,
                       double lookahead = kDefaultLookahead);

}  // namespace b2dr
