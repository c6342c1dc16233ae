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

#pragma once

// Dense f64 kernels used by the MLP and the optimizer. Every kernel has a
// scalar reference implementation; AVX2 (x86-64) and NEON (aarch64) variants
// are selected once at startup. Set FLOWPROVER_SIMD=scalar|avx2|neon to force
// a specific table (an unavailable request falls back to scalar).

#include <cstddef>
#include <string_view>

namespace flowprover::simd {

struct AdamWParams {
  double lr;
  double beta1;
  double beta2;
  double eps;
  double weight_decay;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_i x[i]^2
  double (*sum_squares)(const double* x, std::size_t n);
  // y = W x + bias, W row-major rows x cols
  void (*gemv)(const double* w, const double* x, const double* bias, double* y,
               std::size_t rows, std::size_t cols);
  // out += W^T g
  void (*gemv_transposed_acc)(const double* w, const double* g, double* out,
                              std::size_t rows, std::size_t cols);
  // G += g x^T
  void (*outer_acc)(const double* g, const double* x, double* grad,
                    std::size_t rows, std::size_t cols);
  // Decoupled-weight-decay Adam on one flat parameter buffer.
  void (*adamw)(double* param, const double* grad, double* m, double* v,
                std::size_t n, const AdamWParams& p);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// The dispatch table in use for this process.
const KernelTable& active();

// Reselect the table by name ("scalar", "avx2", "neon", "auto"). Returns false
// and leaves the table unchanged if the request cannot be honoured.
bool select(std::string_view name);

}  // namespace flowprover::simd
