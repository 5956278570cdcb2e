// SPDX-License-Identifier: Apache-2.0
#pragma once

// Data-parallel inner loops used by the diffusion and attention code.
//
// Every kernel has a scalar reference implementation and, where the CPU
// supports it, an AVX2 variant. The variant is chosen once at startup from
// CPUID; B2DR_SIMD=scalar forces the reference path.
//
// Element-wise kernels and the weighted row sum perform the same IEEE
// operations in the same order in both variants, so their outputs are
// bitwise identical. Reductions (dot, sum_sq_diff) reassociate and agree only
// to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace b2dr::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;

  /// out[i] = a * x[i] + b * y[i]
  void (*axpby)(std::span<double> out, double a, std::span<const double> x, double b,
                std::span<const double> y);

  /// out[i] = u[i] + s * (c[i] - u[i])
  void (*guided_mix)(std::span<double> out, std::span<const double> u, std::span<const double> c,
                     double s);

  /// x0 = (z[i] - noise_coef_t * e[i]) / signal_coef_t;
  /// out[i] = signal_coef_prev * x0 + noise_coef_prev * e[i]
  void (*ddim_update)(std::span<double> out, std::span<const double> z, std::span<const double> e,
                      double signal_coef_t, double noise_coef_t, double signal_coef_prev,
                      double noise_coef_prev);

  /// out[i] = (noise_coef * (z[i] - signal_coef * mu[i])) / denom
  void (*gaussian_eps)(std::span<double> out, std::span<const double> z,
                       std::span<const double> mu, double signal_coef, double noise_coef,
                       double denom);

  /// out[i] = sum_k weights[k] * rows[k][i], accumulated in increasing k.
  void (*weighted_row_sum)(std::span<double> out, std::span<const double* const> rows,
                           std::span<const double> weights);

  double (*dot)(std::span<const double> x, std::span<const double> y);

  /// sum_i (x[i] - y[i])^2
  double (*sum_sq_diff)(std::span<const double> x, std::span<const double> y);
};

const KernelTable& scalar_table();

/// Null when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// The table selected for this process.
const KernelTable& active();

}  // namespace b2dr::kernels
