// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/denoiser.hpp"

#include <cmath>
#include <memory>

#include "b2dr/common/error.hpp"
#include "b2dr/kernels/kernels.hpp"

namespace b2dr {

Field gaussian_posterior_eps(const Field& z_t, int t, const Field& mu, double sigma,
                             const NoiseSchedule& sched) {
  require_same_shape(z_t, mu, "analytic_gaussian_denoiser");
  if (t < 0 || t > sched.T) throw Error("analytic_gaussian_denoiser: step out of range");
  const double ab = sched.alpha_bar[t];
  const double denom = ab * sigma * sigma + 1.0 - ab;
  Field out(z_t.channels, z_t.height, z_t.width);
  kernels::active().gaussian_eps(out.span(), z_t.span(), mu.span(), std::sqrt(ab), std::sqrt(1.0 - ab), denom);
  return out;
}

Denoiser analytic_gaussian_denoiser(Field mu, double sigma, const NoiseSchedule& sched) {
  if (sigma < 0.0) throw ConfigError("analytic_gaussian_denoiser: sigma must be >= 0");
  auto shared_mu = std::make_shared<const Field>(std::move(mu));
  auto shared_sched = std::make_shared<const NoiseSchedule>(sched);
  return [shared_mu, shared_sched, sigma](const Field& z, int t, const ConditionSet&) {
    return gaussian_posterior_eps(z, t, *shared_mu, sigma, *shared_sched);
  };
}

}  // namespace b2dr
