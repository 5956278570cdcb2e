// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/loss.hpp"

#include "b2dr/common/error.hpp"
#include "b2dr/diffusion/ops.hpp"
#include "b2dr/kernels/kernels.hpp"

namespace b2dr {

double ldm_loss_estimate(const Denoiser& denoiser, const DataSampler& data, const NoiseSchedule& sched,
                         int num_samples, std::mt19937_64& rng, const ConditionSet& conditions) {
  if (num_samples < 1) throw ConfigError("ldm_loss_estimate needs num_samples >= 1");
  std::uniform_int_distribution<int> step(1, sched.T);
  double total = 0.0;
  for (int i = 0; i < num_samples; ++i) {
    const Field z0 = data(rng);
    const int t = step(rng);
    const Field eps = standard_normal(z0.channels, z0.height, z0.width, rng);
    const Field zt = forward_diffuse(z0, t, eps, sched);
    const Field pred = denoiser(zt, t, conditions);
    require_same_shape(eps, pred, "denoiser output");
    total += kernels::active().sum_sq_diff(eps.span(), pred.span());
  }
  return total / num_samples;
}

}  // namespace b2dr
