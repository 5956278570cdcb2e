// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "b2dr/common/error.hpp"

namespace b2dr {

/// Intelligent Driver Model parameters. Defaults are the commonly published
/// values; v0 is normally replaced by the agent's target speed.
struct IdmParams {
  double v0 = 10.0;        // desired speed [m/s]
  double T_headway = 1.5;  // time headway [s]
  double s0 = 2.0;         // minimum gap [m]
  double a_max = 1.5;      // maximum acceleration [m/s^2]
  double b_comf = 2.0;     // comfortable deceleration [m/s^2]
  double delta = 4.0;      // free-road exponent

  bool valid() const {
    return v0 > 0 && T_headway > 0 && s0 > 0 && a_max > 0 && b_comf > 0 && delta >= 1;
  }
  bool operator==(const IdmParams&) const = default;
};

struct Lead {
  double gap = 0.0;     // bumper-to-bumper [m]
  double v_lead = 0.0;  // lead speed along the follower's path [m/s]
};

/// A non-positive gap: the follower already overlaps its lead.
class LeadOverlapError : public Error {
 public:
  LeadOverlapError() : Error("lead overlap") {}
};

/// Desired dynamic gap s* = s0 + v T + v dv / (2 sqrt(a b)).
double idm_desired_gap(double v, double v_lead, const IdmParams& p);

/// a = a_max [1 - (v/v0)^delta - (s*/s)^2]; without a lead the interaction
/// term is dropped.
double idm_acceleration(double v, const std::optional<Lead>& lead, const IdmParams& p);

/// Per-class parameter table. Classes without an entry use `fallback`.
struct IdmTable {
  IdmParams fallback;
  std::vector<std::optional<IdmParams>> per_class;

  /// Parameters for a class, with v0 replaced by target_speed when given.
  IdmParams for_agent(std::size_t class_id, std::optional<double> target_speed) const;
};

}  // namespace b2dr
