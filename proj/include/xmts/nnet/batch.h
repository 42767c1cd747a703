// xmts/include/xmts/nnet/batch.h

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
#include <vector>

#include "xmts/diff/autodiff.h"

namespace xmts::nnet {

struct BatchGradients {
  double loss_sum = 0.0;  // sum of per-item losses, unscaled
  diff::Gradients grads;  // scale * sum of per-item gradients
};

// Evaluates `item(i, g)` for i in [0, n), each on its own graph over the
// shared read-only ParamSet. Items run in parallel when `parallel` is set;
// losses and gradients are reduced afterwards in index order, so the result
// is identical either way.
BatchGradients batch_forward_backward(const diff::ParamSet& params, std::size_t n,
                                      const std::function<diff::Var(std::size_t, diff::Graph&)>& item,
                                      double scale, bool parallel = true);

// Per-item scalar outputs without gradient bookkeeping.
std::vector<double> batch_forward(const diff::ParamSet& params, std::size_t n,
                                  const std::function<diff::Var(std::size_t, diff::Graph&)>& item,
                                  bool parallel = true);

}  // namespace xmts::nnet
