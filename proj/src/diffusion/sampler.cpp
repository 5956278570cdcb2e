// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/sampler.hpp"

#include <cmath>

#include "b2dr/common/error.hpp"
#include "b2dr/diffusion/ops.hpp"
#include "b2dr/kernels/kernels.hpp"

namespace b2dr {

std::vector<int> sampling_timesteps(int T, int steps) {
  if (steps < 1) throw ConfigError("sampler needs steps >= 1");
  if (steps > T) throw ConfigError("sampler steps exceed schedule length");
  std::vector<int> ts(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    ts[i] = static_cast<int>(std::lround(static_cast<double>(T) * (steps - i) / steps));
  return ts;
}

Field guided_eps(const Denoiser& denoiser, const Field& z, int t, const ConditionSet& conditions,
                 const GuidanceConfig& guidance) {
  Field eps = denoiser(z, t, conditions);
  const bool ref_cfg = guidance.reference_scale && conditions.refs;
  const bool layout_cfg = guidance.layout_scale && conditions.layout;
  if (!ref_cfg && !layout_cfg) return eps;

  // eps_layout: the full prediction with references removed.
  Field eps_layout = eps;
  if (ref_cfg) {
    ConditionSet no_refs = conditions;
    no_refs.refs = false;
    eps_layout = denoiser(z, t, no_refs);
    eps = cfg_combine(eps_layout, eps, *guidance.reference_scale);
  }
  if (layout_cfg) {
    const Field eps_none = denoiser(z, t, ConditionSet{false, false});
    const Field layout_part = cfg_combine(eps_none, eps_layout, *guidance.layout_scale);
    // eps = layout_part + (eps - eps_layout)
    Field ref_part(eps.channels, eps.height, eps.width);
    kernels::active().axpby(ref_part.span(), 1.0, eps.span(), -1.0, eps_layout.span());
    kernels::active().axpby(eps.span(), 1.0, layout_part.span(), 1.0, ref_part.span());
  }
  return eps;
}

Field sample_from(const Denoiser& denoiser, const ConditionSet& conditions, int steps,
                  const NoiseSchedule& sched, Field z, const GuidanceConfig& guidance) {
  const std::vector<int> ts = sampling_timesteps(sched.T, steps);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const Field eps = guided_eps(denoiser, z, ts[i], conditions, guidance);
    require_same_shape(z, eps, "denoiser output");
    z = ddim_step(z, eps, ts[i], ts[i + 1], sched);
  }
  return z;
}

Field sample(const Denoiser& denoiser, const ConditionSet& conditions, int steps,
             const NoiseSchedule& sched, std::mt19937_64& rng, int c, int h, int w,
             const GuidanceConfig& guidance) {
  return sample_from(denoiser, conditions, steps, sched, standard_normal(c, h, w, rng), guidance);
}

}  // namespace b2dr
