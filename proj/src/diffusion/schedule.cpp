// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/schedule.hpp"

#include <cmath>

#include "b2dr/common/error.hpp"

namespace b2dr {

NoiseSchedule build_schedule(int T, double beta_start, double beta_end, ScheduleKind kind) {
  if (T < 1) throw ConfigError("schedule needs T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw ConfigError("schedule needs 0 < beta_start <= beta_end < 1");

  NoiseSchedule s;
  s.T = T;
  s.beta.resize(T);
  for (int i = 0; i < T; ++i) {
    const double f = T == 1 ? 0.0 : static_cast<double>(i) / (T - 1);
    if (kind == ScheduleKind::kLinear) {
      s.beta[i] = beta_start + f * (beta_end - beta_start);
    } else {
      const double r = std::sqrt(beta_start) + f * (std::sqrt(beta_end) - std::sqrt(beta_start));
      s.beta[i] = r * r;
    }
  }
  s.alpha.resize(T);
  s.alpha_bar.resize(T + 1);
  s.alpha_bar[0] = 1.0;
  for (int i = 0; i < T; ++i) {
    s.alpha[i] = 1.0 - s.beta[i];
    s.alpha_bar[i + 1] = s.alpha_bar[i] * s.alpha[i];
  }
  return s;
}

const NoiseSchedule& default_schedule() {
  static const NoiseSchedule s = build_schedule(ScheduleConfig{});
  return s;
}

}  // namespace b2dr
