// SPDX-License-Identifier: Apache-2.0
#include "b2dr/diffusion/ops.hpp"

#include <cmath>

#include "b2dr/common/error.hpp"
#include "b2dr/kernels/kernels.hpp"

namespace b2dr {

namespace {

void check_level(int n, const NoiseSchedule& sched, const char* what) {
  if (n < 0 || n > sched.T)
    throw Error(std::string(what) + ": step " + std::to_string(n) + " outside [0, " + std::to_string(sched.T) + "]");
}

// Reflect-101 index into [0, n).
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

}  // namespace

Field forward_diffuse(const Field& z0, int n, const Field& eps, const NoiseSchedule& sched) {
  require_same_shape(z0, eps, "forward_diffuse");
  check_level(n, sched, "forward_diffuse");
  const double ab = sched.alpha_bar[n];
  Field out(z0.channels, z0.height, z0.width);
  kernels::active().axpby(out.span(), std::sqrt(ab), z0.span(), std::sqrt(1.0 - ab), eps.span());
  return out;
}

std::vector<double> gaussian_kernel(double std_px) {
  if (!(std_px > 0.0)) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * std_px));
  std::vector<double> w(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    w[k + radius] = std::exp(-0.5 * (k * k) / (std_px * std_px));
    total += w[k + radius];
  }
  for (double& x : w) x /= total;
  return w;
}

Field gaussian_blur(const Field& img, double std_px) {
  if (std_px < 0.0) throw Error("gaussian_blur: negative std");
  if (std_px == 0.0) return img;
  const std::vector<double> w = gaussian_kernel(std_px);
  const int r = static_cast<int>(w.size() / 2);
  const auto& k = kernels::active();
  const int H = img.height;
  const int W = img.width;

  Field tmp(img.channels, H, W);
  Field out(img.channels, H, W);
  std::vector<double> padded(static_cast<std::size_t>(W + 2 * r));
  std::vector<const double*> rows(w.size());

  for (int c = 0; c < img.channels; ++c) {
    for (int y = 0; y < H; ++y) {
      const double* src = &img.data[(static_cast<std::size_t>(c) * H + y) * W];
      for (int x = -r; x < W + r; ++x) padded[x + r] = src[reflect(x, W)];
      for (std::size_t t = 0; t < w.size(); ++t) rows[t] = padded.data() + t;
      k.weighted_row_sum({&tmp.at(c, y, 0), static_cast<std::size_t>(W)}, rows, w);
    }
    for (int y = 0; y < H; ++y) {
      for (std::size_t t = 0; t < w.size(); ++t)
        rows[t] = &tmp.at(c, reflect(y + static_cast<int>(t) - r, H), 0);
      k.weighted_row_sum({&out.at(c, y, 0), static_cast<std::size_t>(W)}, rows, w);
    }
  }
  return out;
}

Field standard_normal(int c, int h, int w, std::mt19937_64& rng) {
  Field f(c, h, w);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& x : f.data) x = normal(rng);
  return f;
}

ModulatedPrevious modulate_previous_at(const Field& prev, int n, const NoiseSchedule& sched,
                                       std::mt19937_64& rng, double blur_std, const LatentEncoder& encode) {
  check_level(n, sched, "modulate_previous");
  Field blurred = gaussian_blur(prev, blur_std);
  if (encode) blurred = encode(blurred);
  const Field eps = standard_normal(blurred.channels, blurred.height, blurred.width, rng);
  return {forward_diffuse(blurred, n, eps, sched), n};
}

ModulatedPrevious modulate_previous(const Field& prev, const NoiseSchedule& sched, int n_max,
                                    std::mt19937_64& rng, double blur_std, const LatentEncoder& encode) {
  if (n_max < 0 || n_max > sched.T) throw ConfigError("modulate_previous: N_max outside [0, T]");
  std::uniform_int_distribution<int> level(0, n_max);
  const int n = level(rng);
  return modulate_previous_at(prev, n, sched, rng, blur_std, encode);
}

Field cfg_combine(const Field& eps_uncond, const Field& eps_cond, double s) {
  require_same_shape(eps_uncond, eps_cond, "cfg_combine");
  Field out(eps_uncond.channels, eps_uncond.height, eps_uncond.width);
  kernels::active().guided_mix(out.span(), eps_uncond.span(), eps_cond.span(), s);
  return out;
}

Field ddim_step(const Field& z_t, const Field& eps_hat, int t, int t_prev, const NoiseSchedule& sched) {
  require_same_shape(z_t, eps_hat, "ddim_step");
  if (!(0 <= t_prev && t_prev < t && t <= sched.T))
    throw Error("ddim_step: need 0 <= t_prev < t <= T, got t=" + std::to_string(t) +
                " t_prev=" + std::to_string(t_prev));
  const double at = sched.alpha_bar[t];
  const double ap = sched.alpha_bar[t_prev];
  Field out(z_t.channels, z_t.height, z_t.width);
  kernels::active().ddim_update(out.span(), z_t.span(), eps_hat.span(), std::sqrt(at), std::sqrt(1.0 - at),
                                std::sqrt(ap), std::sqrt(1.0 - ap));
  return out;
}

}  // namespace b2dr
