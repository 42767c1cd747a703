// xmts/src/nnet/schedule.cc

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

#include "xmts/nnet/schedule.h"

#include <algorithm>
#include <cmath>

#include "xmts/diff/errors.h"

namespace xmts::nnet {

double noam_lr(const LrSchedule& s, std::uint64_t step) {
  require(step >= 1, "noam_lr: step must be >= 1");
  require(s.warmup >= 1 && s.coeff >= 0.0 && s.dim >= 1, "noam_lr: invalid schedule");
  const double t = static_cast<double>(step);
  const double w = static_cast<double>(s.warmup);
  return s.coeff / std::sqrt(static_cast<double>(s.dim)) *
         std::min(1.0 / std::sqrt(t), t / (w * std::sqrt(w)));
}

}  // namespace xmts::nnet
