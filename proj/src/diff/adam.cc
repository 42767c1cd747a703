// xmts/src/diff/adam.cc

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

#include "xmts/diff/adam.h"

#include <cmath>

#include "xmts/diff/errors.h"

namespace xmts::diff {

void adam_step(ParamSet& params, const Gradients& grads, AdamState& state, double lr) {
  require(lr >= 0.0, "adam_step: learning rate must be non-negative");
  for (const auto& [name, g] : grads) {
    require(params.contains(name), "adam_step: gradient for unknown parameter '" + name + "'");
    require(params.value(name).same_shape(g),
            "adam_step: gradient shape " + shape_str(g.shape()) + " does not match parameter '" +
                name + "' " + shape_str(params.value(name).shape()));
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  for (const auto& [name, g] : grads) {
    if (!params.trainable(name)) continue;
    Tensor& p = params.mutable_value(name);
    auto [it, inserted] = state.moments.try_emplace(name);
    if (inserted) it->second = {Tensor(p.shape(), 0.0), Tensor(p.shape(), 0.0)};
    Tensor& m = it->second.first;
    Tensor& v = it->second.second;
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double mhat = m[i] / c1;
      const double vhat = v[i] / c2;
      p[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
  }
}

}  // namespace xmts::diff
