// xmts/include/xmts/diff/adam.h

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
#include <map>
#include <string>

#include "xmts/diff/params.h"

namespace xmts::diff {

struct AdamMoments {
  Tensor first;
  Tensor second;
};

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t step = 0;
  std::map<std::string, AdamMoments> moments;
};

// One bias-corrected Adam update in place. Only trainable parameters with a
// gradient entry move; frozen ones are left bit-identical even when a
// gradient is supplied. The step counter advances by exactly one.
void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr);

}  // namespace xmts::diff
