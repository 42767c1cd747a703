// xmts/src/diff/fdcheck.cc

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

#include "xmts/diff/fdcheck.h"

#include <algorithm>
#include <cmath>

#include "xmts/diff/autodiff.h"
#include "xmts/diff/errors.h"

namespace xmts::diff {

FdReport finite_difference_report(const std::function<Var(Graph&)>& f, const ParamSet& params,
                                  double h) {
  require(h > 0.0, "finite_difference_check: step must be positive");

  Gradients analytic;
  double base = 0.0;
  {
    Graph g(&params);
    Var loss = f(g);
    if (g.non_differentiable())
      throw InvalidOracle("finite-difference oracle: op '" + g.non_differentiable_op() +
                          "' is not differentiable");
    require(loss.value().size() == 1, "finite_difference_check: f must return a scalar");
    base = loss.value().item();
    g.backward(loss);
    analytic = g.param_grads();
  }
  if (forward_only(params, f) != base)
    throw InvalidOracle("finite-difference oracle: f is not deterministic");

  FdReport report;
  ParamSet probe = params;
  for (const auto& [name, param] : params) {
    if (!param.trainable) continue;
    auto it = analytic.find(name);
    Tensor& v = probe.mutable_value(name);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double orig = v[i];
      v[i] = orig + h;
      const double up = forward_only(probe, f);
      v[i] = orig - h;
      const double down = forward_only(probe, f);
      v[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = it == analytic.end() ? 0.0 : it->second[i];
      const double err = std::fabs(a - numeric) / std::max(1.0, std::fabs(a));
      ++report.entries_checked;
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_param = name;
        report.worst_index = i;
      }
    }
  }
  return report;
}

}  // namespace xmts::diff
