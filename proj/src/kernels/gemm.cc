// xmts/src/kernels/gemm.cc

// Copyright 2026  The xmts Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "xmts/kernels/gemm.h"

#include <omp.h>

namespace xmts::kernels {

namespace {

inline double dot_entry(const GemmArgs& g, std::span<const double> a, std::span<const double> b,
                        std::size_t i, std::size_t j) {
  double acc = 0.0;
  const bool ta = g.trans_a == Trans::kYes;
  const bool tb = g.trans_b == Trans::kYes;
  for (std::size_t p = 0; p < g.k; ++p) {
    const double av = ta ? a[p * g.m + i] : a[i * g.k + p];
    const double bv = tb ? b[j * g.k + p] : b[p * g.n + j];
    acc += av * bv;
  }
  return acc;
}

inline void row_kernel(const GemmArgs& g, std::span<const double> a, std::span<const double> b,
                       std::span<double> c, std::size_t i) {
  for (std::size_t j = 0; j < g.n; ++j) {
    const double v = dot_entry(g, a, b, i, j);
    if (g.accumulate)
      c[i * g.n + j] += v;
    else
      c[i * g.n + j] = v;
  }
}

}  // namespace

void gemm_reference(const GemmArgs& args, std::span<const double> a, std::span<const double> b,
                    std::span<double> c) {
  for (std::size_t i = 0; i < args.m; ++i) row_kernel(args, a, b, c, i);
}

void gemm(const GemmArgs& args, std::span<const double> a, std::span<const double> b,
          std::span<double> c) {
  const std::size_t work = args.m * args.n * args.k;
  if (work < kGemmParallelThreshold || omp_in_parallel() || omp_get_max_threads() == 1) {
    gemm_reference(args, a, b, c);
    return;
  }
  const auto rows = static_cast<long long>(args.m);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < rows; ++i) row_kernel(args, a, b, c, static_cast<std::size_t>(i));
}

}  // namespace xmts::kernels
