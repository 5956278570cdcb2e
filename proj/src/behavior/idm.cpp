// SPDX-License-Identifier: Apache-2.0
#include "b2dr/behavior/idm.hpp"

#include <algorithm>
#include <cmath>

namespace b2dr {

double idm_desired_gap(double v, double v_lead, const IdmParams& p) {
  const double dv = v - v_lead;
  // The dynamic term is clamped at zero so a lead pulling away never shrinks
  // the desired gap below s0; this keeps a(v) monotone.
  return p.s0 + std::max(0.0, v * p.T_headway + v * dv / (2.0 * std::sqrt(p.a_max * p.b_comf)));
}

double idm_acceleration(double v, const std::optional<Lead>& lead, const IdmParams& p) {
  const double free_term = 1.0 - std::pow(v / p.v0, p.delta);
  if (!lead) return p.a_max * free_term;
  if (!(lead->gap > 0.0)) throw LeadOverlapError();
  const double ratio = idm_desired_gap(v, lead->v_lead, p) / lead->gap;
  return p.a_max * (free_term - ratio * ratio);
}

IdmParams IdmTable::for_agent(std::size_t class_id, std::optional<double> target_speed) const {
  IdmParams p = fallback;
  if (class_id < per_class.size() && per_class[class_id]) p = *per_class[class_id];
  if (target_speed && *target_speed > 0.0) p.v0 = *target_speed;
  return p;
}

}  // namespace b2dr
