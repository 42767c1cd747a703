// xmts/include/xmts/diff/autodiff.h

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

#include <functional>

#include "xmts/diff/graph.h"

namespace xmts::diff {

struct LossAndGrads {
  double loss = 0.0;
  Gradients grads;
};

// Builds the graph with `build`, runs backward on the scalar it returns and
// collects gradients of every trainable parameter the graph touched.
LossAndGrads forward_backward(const ParamSet& params, const std::function<Var(Graph&)>& build);

// Forward only; no gradient bookkeeping.
double forward_only(const ParamSet& params, const std::function<Var(Graph&)>& build);

// Sums `parts` in index order into `into`, then scales by `factor`.
void reduce_gradients(const std::vector<Gradients>& parts, double factor, Gradients& into);

}  // namespace xmts::diff
