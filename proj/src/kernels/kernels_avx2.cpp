// SPDX-License-Identifier: Apache-2.0
//
// Compiled with -mavx2 only (no -mfma): each lane must round exactly like the
// scalar reference.
#include "b2dr/kernels/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace b2dr::kernels::avx2 {
namespace {

constexpr std::size_t kLanes = 4;

void axpby(std::span<double> out, double a, std::span<const double> x, double b,
           std::span<const double> y) {
  const std::size_t n = out.size();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d ax = _mm256_mul_pd(va, _mm256_loadu_pd(x.data() + i));
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y.data() + i));
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(ax, by));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void guided_mix(std::span<double> out, std::span<const double> u, std::span<const double> c,
                double s) {
  const std::size_t n = out.size();
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vu = _mm256_loadu_pd(u.data() + i);
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(c.data() + i), vu);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(vu, _mm256_mul_pd(vs, diff)));
  }
  for (; i < n; ++i) out[i] = u[i] + s * (c[i] - u[i]);
}

void ddim_update(std::span<double> out, std::span<const double> z, std::span<const double> e,
                 double signal_t, double noise_t, double signal_prev, double noise_prev) {
  const std::size_t n = out.size();
  const __m256d st = _mm256_set1_pd(signal_t);
  const __m256d nt = _mm256_set1_pd(noise_t);
  const __m256d sp = _mm256_set1_pd(signal_prev);
  const __m256d np = _mm256_set1_pd(noise_prev);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d ve = _mm256_loadu_pd(e.data() + i);
    const __m256d x0 =
        _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(z.data() + i), _mm256_mul_pd(nt, ve)), st);
    _mm256_storeu_pd(out.data() + i, _mm256_add_pd(_mm256_mul_pd(sp, x0), _mm256_mul_pd(np, ve)));
  }
  for (; i < n; ++i) {
    const double x0 = (z[i] - noise_t * e[i]) / signal_t;
    out[i] = signal_prev * x0 + noise_prev * e[i];
  }
}

void gaussian_eps(std::span<double> out, std::span<const double> z, std::span<const double> mu,
                  double signal, double noise, double denom) {
  const std::size_t n = out.size();
  const __m256d vs = _mm256_set1_pd(signal);
  const __m256d vn = _mm256_set1_pd(noise);
  const __m256d vd = _mm256_set1_pd(denom);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d centered =
        _mm256_sub_pd(_mm256_loadu_pd(z.data() + i), _mm256_mul_pd(vs, _mm256_loadu_pd(mu.data() + i)));
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_mul_pd(vn, centered), vd));
  }
  for (; i < n; ++i) out[i] = (noise * (z[i] - signal * mu[i])) / denom;
}

void weighted_row_sum(std::span<double> out, std::span<const double* const> rows,
                      std::span<const double> weights) {
  const std::size_t n = out.size();
  const std::size_t taps = weights.size();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < taps; ++k) {
      const __m256d term = _mm256_mul_pd(_mm256_set1_pd(weights[k]), _mm256_loadu_pd(rows[k] + i));
      acc = _mm256_add_pd(acc, term);
    }
    _mm256_storeu_pd(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc = acc + weights[k] * rows[k][i];
    out[i] = acc;
  }
}

double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i + kLanes),
                                             _mm256_loadu_pd(y.data() + i + kLanes)));
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_sq_diff(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double total = horizontal_sum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    total += d * d;
  }
  return total;
}

}  // namespace

const KernelTable& table() {
  static const KernelTable t{Isa::kAvx2,  "avx2",           axpby, guided_mix, ddim_update,
                             gaussian_eps, weighted_row_sum, dot,   sum_sq_diff};
  return t;
}

}  // namespace b2dr::kernels::avx2

#endif
