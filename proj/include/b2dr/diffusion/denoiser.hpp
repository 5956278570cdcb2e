// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "b2dr/diffusion/field.hpp"
#include "b2dr/diffusion/schedule.hpp"

namespace b2dr {

/// Which condition branches a denoiser call receives. Guidance toggles them
/// off to obtain the unconditional branches.
struct ConditionSet {
  bool layout = true;
  bool refs = true;

  bool operator==(const ConditionSet&) const = default;
};

/// (z_t, t, conditions) -> predicted noise of the same shape. Must be
/// deterministic and reentrant.
using Denoiser = std::function<Field(const Field& z_t, int t, const ConditionSet& conditions)>;

/// Posterior-mean noise predictor for data ~ N(mu, sigma^2 I):
/// eps*(z_t, t) = sqrt(1 - abar_t) (z_t - sqrt(abar_t) mu) / (abar_t sigma^2 + 1 - abar_t).
/// Conditions are ignored.
Denoiser analytic_gaussian_denoiser(Field mu, double sigma, const NoiseSchedule& sched);

/// Single evaluation of the same formula, for callers that select mu per branch.
Field gaussian_posterior_eps(const Field& z_t, int t, const Field& mu, double sigma,
                             const NoiseSchedule& sched);

}  // namespace b2dr
