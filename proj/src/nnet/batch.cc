// xmts/src/nnet/batch.cc

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

#include "xmts/nnet/batch.h"

#include "xmts/kernels/parallel.h"

namespace xmts::nnet {

BatchGradients batch_forward_backward(const diff::ParamSet& params, std::size_t n,
                                      const std::function<diff::Var(std::size_t, diff::Graph&)>& item,
                                      double scale, bool parallel) {
  std::vector<diff::LossAndGrads> parts(n);
  auto run = [&](std::size_t i) {
    parts[i] = diff::forward_backward(params, [&](diff::Graph& g) { return item(i, g); });
  };
  if (parallel) {
    kernels::parallel_for(n, run);
  } else {
    kernels::serial_for(n, run);
  }
  BatchGradients out;
  std::vector<diff::Gradients> grads;
  grads.reserve(n);
  for (auto& p : parts) {
    out.loss_sum += p.loss;
    grads.push_back(std::move(p.grads));
  }
  diff::reduce_gradients(grads, scale, out.grads);
  return out;
}

std::vector<double> batch_forward(const diff::ParamSet& params, std::size_t n,
                                  const std::function<diff::Var(std::size_t, diff::Graph&)>& item,
                                  bool parallel) {
  std::vector<double> out(n);
  auto run = [&](std::size_t i) {
    out[i] = diff::forward_only(params, [&](diff::Graph& g) { return item(i, g); });
  };
  if (parallel) {
    kernels::parallel_for(n, run);
  } else {
    kernels::serial_for(n, run);
  }
  return out;
}

}  // namespace xmts::nnet
