// SPDX-License-Identifier: Apache-2.0
#include "b2dr/kernels/kernels.hpp"

namespace b2dr::kernels {
namespace {

void axpby(std::span<double> out, double a, std::span<const double> x, double b,
           std::span<const double> y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
}

void guided_mix(std::span<double> out, std::span<const double> u, std::span<const double> c,
                double s) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = u[i] + s * (c[i] - u[i]);
}

void ddim_update(std::span<double> out, std::span<const double> z, std::span<const double> e,
                 double signal_t, double noise_t, double signal_prev, double noise_prev) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double x0 = (z[i] - noise_t * e[i]) / signal_t;
    out[i] = signal_prev * x0 + noise_prev * e[i];
  }
}

void gaussian_eps(std::span<double> out, std::span<const double> z, std::span<const double> mu,
                  double signal, double noise, double denom) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (noise * (z[i] - signal * mu[i])) / denom;
}

void weighted_row_sum(std::span<double> out, std::span<const double* const> rows,
                      std::span<const double> weights) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) acc = acc + weights[k] * rows[k][i];
    out[i] = acc;
  }
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq_diff(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar, "scalar", axpby,           guided_mix, ddim_update,
                                 gaussian_eps, weighted_row_sum, dot, sum_sq_diff};
  return table;
}

}  // namespace b2dr::kernels
