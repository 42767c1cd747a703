// xmts/src/diff/autodiff.cc

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

#include "xmts/diff/autodiff.h"

#include "xmts/diff/errors.h"

namespace xmts::diff {

LossAndGrads forward_backward(const ParamSet& params, const std::function<Var(Graph&)>& build) {
  Graph g(&params);
  Var loss = build(g);
  require(loss.valid() && loss.value().size() == 1,
          "forward_backward: graph output must be a scalar");
  g.backward(loss);
  return {loss.value().item(), g.param_grads()};
}

double forward_only(const ParamSet& params, const std::function<Var(Graph&)>& build) {
  Graph g(&params, /*grad_enabled=*/false);
  Var loss = build(g);
  require(loss.valid() && loss.value().size() == 1,
          "forward_only: graph output must be a scalar");
  return loss.value().item();
}

void reduce_gradients(const std::vector<Gradients>& parts, double factor, Gradients& into) {
  for (const Gradients& part : parts) {
    for (const auto& [name, grad] : part) {
      auto it = into.find(name);
      if (it == into.end()) {
        into.emplace(name, grad);
        continue;
      }
      require(it->second.same_shape(grad), "reduce_gradients: shape mismatch for " + name);
      auto dst = it->second.data();
      auto src = grad.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
  for (auto& [_, grad] : into)
    for (double& v : grad.storage()) v *= factor;
}

}  // namespace xmts::diff
