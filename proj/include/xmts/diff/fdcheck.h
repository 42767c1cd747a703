// xmts/include/xmts/diff/fdcheck.h

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

struct FdReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  std::size_t entries_checked = 0;
};

// Compares reverse-mode gradients of the scalar built by `f` against central
// differences for every entry of every trainable parameter. Error per entry
// is |analytic - numeric| / max(1, |analytic|).
//
// Throws InvalidOracle if `f` is not deterministic or routes through a
// non-differentiable op.
FdReport finite_difference_report(const std::function<Var(Graph&)>& f, const ParamSet& params,
                                  double h = 1e-5);

inline double finite_difference_check(const std::function<Var(Graph&)>& f,
                                      const ParamSet& params, double h = 1e-5) {
  return finite_difference_report(f, params, h).max_rel_error;
}

}  // namespace xmts::diff
