// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace b2dr {

enum class ScheduleKind { kLinear, kScaledLinear };

/// Variance schedule with alpha_bar[0] = 1 prepended, so index t in [0, T]
/// addresses the cumulative product after t noising steps.
struct NoiseSchedule {
  int T = 0;
  std::vector<double> beta;       // size T, beta[t-1] is step t
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // size T + 1
};

struct ScheduleConfig {
  int T = 1000;
  double beta_start = 8.5e-4;
  double beta_end = 1.2e-2;
  ScheduleKind kind = ScheduleKind::kScaledLinear;
};

/// scaled_linear interpolates sqrt(beta) linearly; linear interpolates beta.
/// Throws ConfigError unless 0 < beta_start <= beta_end < 1 and T >= 1.
NoiseSchedule build_schedule(int T, double beta_start, double beta_end, ScheduleKind kind);

inline NoiseSchedule build_schedule(const ScheduleConfig& c) {
  return build_schedule(c.T, c.beta_start, c.beta_end, c.kind);
}

/// The Stable Diffusion v1.5 schedule (T = 1000, scaled_linear 8.5e-4..1.2e-2).
const NoiseSchedule& default_schedule();

}  // namespace b2dr
