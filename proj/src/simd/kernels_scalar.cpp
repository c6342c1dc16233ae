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

#include <cmath>

namespace flowprover::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void gemv_scalar(const double* w, const double* x, const double* bias,
                 double* y, std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
  }
}

void gemv_transposed_acc_scalar(const double* w, const double* g, double* out,
                                std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_scalar(g[r], w + r * cols, out, cols);
  }
}

void outer_acc_scalar(const double* g, const double* x, double* grad,
                      std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    if (g[r] == 0.0) continue;
    axpy_scalar(g[r], x, grad + r * cols, cols);
  }
}

void adamw_scalar(double* param, const double* grad, double* m, double* v,
                  std::size_t n, const AdamWParams& p) {
  const double decay = 1.0 - p.lr * p.weight_decay;
  const double one_minus_b1 = 1.0 - p.beta1;
  const double one_minus_b2 = 1.0 - p.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    param[i] *= decay;
    m[i] = p.beta1 * m[i] + one_minus_b1 * grad[i];
    v[i] = p.beta2 * v[i] + one_minus_b2 * (grad[i] * grad[i]);
    const double m_hat = m[i] / p.bias_correction1;
    const double v_hat = v[i] / p.bias_correction2;
    param[i] -= p.lr * (m_hat / (std::sqrt(v_hat) + p.eps));
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",           dot_scalar,
      axpy_scalar,        sum_squares_scalar,
      gemv_scalar,        gemv_transposed_acc_scalar,
      outer_acc_scalar,   adamw_scalar,
  };
  return table;
}

}  // namespace flowprover::simd
