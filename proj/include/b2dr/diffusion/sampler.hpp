// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "b2dr/diffusion/denoiser.hpp"

namespace b2dr {

inline constexpr int kDefaultSamplingSteps = 20;
inline constexpr double kDefaultReferenceGuidance = 2.0;

struct GuidanceConfig {
  /// Layout CFG between no-condition and layout-only branches.
  std::optional<double> layout_scale;
  /// Reference CFG between the no-reference and full branches.
  std::optional<double> reference_scale;
};

/// Uniformly strided timesteps from T down to 0 inclusive; steps + 1 entries.
std::vector<int> sampling_timesteps(int T, int steps);

/// Guided noise prediction for one step:
///   eps = eps_none + s_l (eps_layout - eps_none) + s_r (eps_full - eps_layout)
/// with each term present only when its guidance and condition are enabled.
Field guided_eps(const Denoiser& denoiser, const Field& z, int t, const ConditionSet& conditions,
                 const GuidanceConfig& guidance);

/// DDIM sampling from standard normal noise of shape (c, h, w).
Field sample(const Denoiser& denoiser, const ConditionSet& conditions, int steps,
             const NoiseSchedule& sched, std::mt19937_64& rng, int c, int h, int w,
             const GuidanceConfig& guidance = {});

/// As sample(), starting from a caller-provided initial noise.
Field sample_from(const Denoiser& denoiser, const ConditionSet& conditions, int steps,
                  const NoiseSchedule& sched, Field z, const GuidanceConfig& guidance = {});

}  // namespace b2dr
