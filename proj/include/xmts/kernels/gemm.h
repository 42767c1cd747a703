// xmts/include/xmts/kernels/gemm.h

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

#pragma once

#include <cstddef>
#include <span>

namespace xmts::kernels {

enum class Trans { kNo, kYes };

// C (M x N) = op(A) * op(B) (+ C when accumulate). op(A) is M x K and
// op(B) is K x N; all buffers row-major. Each output element is a single
// dot product summed in ascending k, so both variants below give
// bit-identical results.
struct GemmArgs {
  Trans trans_a = Trans::kNo;
  Trans trans_b = Trans::kNo;
  std::size_t m = 0, n = 0, k = 0;
  bool accumulate = false;
};

// Serial reference.
void gemm_reference(const GemmArgs& args, std::span<const double> a, std::span<const double> b,
                    std::span<double> c);

// OpenMP over output rows once the problem is large enough; falls back to
// the serial loop inside an already-parallel region.
void gemm(const GemmArgs& args, std::span<const double> a, std::span<const double> b,
          std::span<double> c);

// Multiply-add count above which gemm() spawns threads.
inline constexpr std::size_t kGemmParallelThreshold = 1u << 16;

}  // namespace xmts::kernels
