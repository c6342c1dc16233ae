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

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace flowprover::nn {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log-sum-exp over finite-or-(-inf) entries; -inf when all are -inf.
inline double logsumexp(std::span<const double> x) {
  double m = kNegInf;
  for (const double v : x) m = v > m ? v : m;
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (const double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

// Entries equal to -inf get probability exactly 0.
inline std::vector<double> log_softmax(std::span<const double> x) {
  const double lse = logsumexp(x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - lse;
  return out;
}

inline std::vector<double> softmax(std::span<const double> x) {
  std::vector<double> out = log_softmax(x);
  for (double& v : out) v = std::exp(v);
  return out;
}

}  // namespace flowprover::nn
