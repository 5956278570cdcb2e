// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <random>

#include "b2dr/diffusion/denoiser.hpp"

namespace b2dr {

using DataSampler = std::function<Field(std::mt19937_64&)>;

/// Monte Carlo estimate of E ||eps - eps_theta(z_t; t, c)||^2 with
/// t ~ U{1..T} and eps ~ N(0, I).
double ldm_loss_estimate(const Denoiser& denoiser, const DataSampler& data, const NoiseSchedule& sched,
                         int num_samples, std::mt19937_64& rng, const ConditionSet& conditions = {});

}  // namespace b2dr
