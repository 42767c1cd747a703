// xmts/include/xmts/nnet/schedule.h

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

#include <cstdint>

namespace xmts::nnet {

/// Inverse-square-root warmup schedule:
///   lr(step) = coeff * dim^-0.5 * min(step^-0.5, step * warmup^-1.5)
/// Linear ramp up to `warmup`, then decays as step^-0.5.
struct LrSchedule {
  std::uint64_t warmup = 25000;
  double coeff = 10.0;
  std::uint64_t dim = 512;
};

double noam_lr(const LrSchedule& s, std::uint64_t step);

}  // namespace xmts::nnet
