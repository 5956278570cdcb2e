// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "b2dr/diffusion/field.hpp"
#include "b2dr/diffusion/schedule.hpp"

namespace b2dr {

/// sqrt(abar_n) z0 + sqrt(1 - abar_n) eps.
Field forward_diffuse(const Field& z0, int n, const Field& eps, const NoiseSchedule& sched);

/// Normalized truncated Gaussian taps over [-ceil(3 std), ceil(3 std)].
std::vector<double> gaussian_kernel(double std_px);

/// Separable blur with reflect padding (edge sample not repeated), applied per
/// channel. std == 0 returns the input unchanged.
Field gaussian_blur(const Field& img, double std_px);

Field standard_normal(int c, int h, int w, std::mt19937_64& rng);

/// Maps the blurred previous frame into the space noise is added in. Identity
/// when the caller already passes a latent.
using LatentEncoder = std::function<Field(const Field&)>;

struct ModulatedPrevious {
  Field corrupted;
  int noise_level = 0;
};

inline constexpr int kDefaultModulationMax = 300;
inline constexpr double kDefaultBlurStd = 1.0;

/// Draws n ~ U{0..N_max}, blurs, encodes and forward-diffuses to level n.
ModulatedPrevious modulate_previous(const Field& prev, const NoiseSchedule& sched, int n_max,
                                    std::mt19937_64& rng, double blur_std = kDefaultBlurStd,
                                    const LatentEncoder& encode = {});

/// Same corruption at a caller-chosen level n.
ModulatedPrevious modulate_previous_at(const Field& prev, int n, const NoiseSchedule& sched,
                                       std::mt19937_64& rng, double blur_std = kDefaultBlurStd,
                                       const LatentEncoder& encode = {});

/// eps_u + s (eps_c - eps_u).
Field cfg_combine(const Field& eps_uncond, const Field& eps_cond, double s);

/// Deterministic DDIM update from t to t_prev (eta = 0).
Field ddim_step(const Field& z_t, const Field& eps_hat, int t, int t_prev, const NoiseSchedule& sched);

}  // namespace b2dr
