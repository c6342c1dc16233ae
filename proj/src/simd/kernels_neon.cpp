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

#if defined(FLOWPROVER_HAVE_NEON)

#include <arm_neon.h>

#include <cmath>

namespace flowprover::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_neon(const double* x, std::size_t n) { return dot_neon(x, x, n); }

void gemv_neon(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_neon(w + r * cols, x, cols);
}

void gemv_transposed_acc_neon(const double* w, const double* g, double* out,
                              std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_neon(g[r], w + r * cols, out, cols);
  }
}

void outer_acc_neon(const double* g, const double* x, double* grad,
                    std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_neon(g[r], x, grad + r * cols, cols);
  }
}

void adamw_neon(double* param, const double* grad, double* m, double* v,
                std::size_t n, const AdamWParams& p) {
  const float64x2_t decay = vdupq_n_f64(1.0 - p.lr * p.weight_decay);
  const float64x2_t b1 = vdupq_n_f64(p.beta1);
  const float64x2_t b2 = vdupq_n_f64(p.beta2);
  const float64x2_t omb1 = vdupq_n_f64(1.0 - p.beta1);
  const float64x2_t omb2 = vdupq_n_f64(1.0 - p.beta2);
  const float64x2_t bc1 = vdupq_n_f64(p.bias_correction1);
  const float64x2_t bc2 = vdupq_n_f64(p.bias_correction2);
  const float64x2_t lr = vdupq_n_f64(p.lr);
  const float64x2_t eps = vdupq_n_f64(p.eps);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    float64x2_t pv = vmulq_f64(vld1q_f64(param + i), decay);
    const float64x2_t mv = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(omb1, g));
    const float64x2_t vv =
        vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(omb2, vmulq_f64(g, g)));
    const float64x2_t step = vdivq_f64(
        vdivq_f64(mv, bc1), vaddq_f64(vsqrtq_f64(vdivq_f64(vv, bc2)), eps));
    pv = vsubq_f64(pv, vmulq_f64(lr, step));
    vst1q_f64(param + i, pv);
    vst1q_f64(m + i, mv);
    vst1q_f64(v + i, vv);
  }
  for (; i < n; ++i) {
    param[i] *= 1.0 - p.lr * p.weight_decay;
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * grad[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * (grad[i] * grad[i]);
    param[i] -= p.lr * ((m[i] / p.bias_correction1) /
                        (std::sqrt(v[i] / p.bias_correction2) + p.eps));
  }
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{
      "neon",          dot_neon,
      axpy_neon,       sum_squares_neon,
      gemv_neon,       gemv_transposed_acc_neon,
      outer_acc_neon,  adamw_neon,
  };
  return &table;
}

}  // namespace flowprover::simd

#else

namespace flowprover::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace flowprover::simd

#endif
