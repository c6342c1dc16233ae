// Copyright 2026 The FlowProver Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flowprover/simd/kernels.hpp"

#if defined(FLOWPROVER_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace flowprover::simd {
namespace {

// No FMA: elementwise kernels stay bit-identical to the scalar path; only the
// reductions (dot, sum_squares, gemv) differ, by summation order.

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                             _mm256_loadu_pd(b + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                             _mm256_loadu_pd(b + i)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(y + i,
                     _mm256_add_pd(yv, _mm256_mul_pd(a, _mm256_loadu_pd(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_avx2(const double* x, std::size_t n) {
  return dot_avx2(x, x, n);
}

void gemv_avx2(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot_avx2(w + r * cols, x, cols);
  }
}

void gemv_transposed_acc_avx2(const double* w, const double* g, double* out,
                              std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_avx2(g[r], w + r * cols, out, cols);
  }
}

void outer_acc_avx2(const double* g, const double* x, double* grad,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_avx2(g[r], x, grad + r * cols, cols);
  }
}

void adamw_avx2(double* param, const double* grad, double* m, double* v,
                std::size_t n, const AdamWParams& p) {
  const double decay_s = 1.0 - p.lr * p.weight_decay;
  const __m256d decay = _mm256_set1_pd(decay_s);
  const __m256d b1 = _mm256_set1_pd(p.beta1);
  const __m256d b2 = _mm256_set1_pd(p.beta2);
  const __m256d omb1 = _mm256_set1_pd(1.0 - p.beta1);
  const __m256d omb2 = _mm256_set1_pd(1.0 - p.beta2);
  const __m256d bc1 = _mm256_set1_pd(p.bias_correction1);
  const __m256d bc2 = _mm256_set1_pd(p.bias_correction2);
  const __m256d lr = _mm256_set1_pd(p.lr);
  const __m256d eps = _mm256_set1_pd(p.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    __m256d pv = _mm256_mul_pd(_mm256_loadu_pd(param + i), decay);
    const __m256d mv = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(omb1, g));
    const __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
    const __m256d m_hat = _mm256_div_pd(mv, bc1);
    const __m256d v_hat = _mm256_div_pd(vv, bc2);
    const __m256d step = _mm256_div_pd(
        m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), eps));
    pv = _mm256_sub_pd(pv, _mm256_mul_pd(lr, step));
    _mm256_storeu_pd(param + i, pv);
    _mm256_storeu_pd(m + i, mv);
    _mm256_storeu_pd(v + i, vv);
  }
  for (; i < n; ++i) {
    param[i] *= decay_s;
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * grad[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * (grad[i] * grad[i]);
    const double m_hat = m[i] / p.bias_correction1;
    const double v_hat = v[i] / p.bias_correction2;
    param[i] -= p.lr * (m_hat / (std::sqrt(v_hat) + p.eps));
  }
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = __builtin_cpu_supports("avx2");
  static const KernelTable table{
      "avx2",          dot_avx2,
      axpy_avx2,       sum_squares_avx2,
      gemv_avx2,       gemv_transposed_acc_avx2,
      outer_acc_avx2,  adamw_avx2,
  };
  return supported ? &table : nullptr;
}

}  // namespace flowprover::simd

#else

namespace flowprover::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace flowprover::simd

#endif
