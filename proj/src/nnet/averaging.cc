// xmts/src/nnet/averaging.cc

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

#include "xmts/nnet/averaging.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xmts/diff/errors.h"

namespace xmts::nnet {

ModelCheckpoint average_checkpoints(const std::vector<ModelCheckpoint>& ckpts) {
  require(!ckpts.empty(), "average_checkpoints: empty checkpoint list");
  const auto& ref = ckpts.front().params;
  for (std::size_t c = 1; c < ckpts.size(); ++c) {
    const auto& ps = ckpts[c].params;
    require(ps.size() == ref.size(), "average_checkpoints: checkpoint " + std::to_string(c) +
                                         " has a different tensor set");
    for (const auto& [name, p] : ref) {
      require(ps.contains(name),
              "average_checkpoints: checkpoint " + std::to_string(c) + " lacks '" + name + "'");
      require(ps.value(name).shape() == p.value.shape(),
              "average_checkpoints: shape mismatch for '" + name + "'");
    }
  }

  const double k = static_cast<double>(ckpts.size());
  ModelCheckpoint out;
  std::vector<double> column(ckpts.size());
  for (const auto& [name, p] : ref) {
    diff::Tensor avg(p.value.shape(), 0.0);
    auto dst = avg.data();
    for (std::size_t i = 0; i < dst.size(); ++i) {
      for (std::size_t c = 0; c < ckpts.size(); ++c) column[c] = ckpts[c].params.value(name)[i];
      std::sort(column.begin(), column.end());
      double s = 0.0;
      for (double v : column) s += v;
      dst[i] = s / k;
    }
    out.params.add(name, std::move(avg), p.trainable);
  }
  std::uint64_t step = 0;
  for (const auto& c : ckpts) step = std::max(step, c.step);
  out.step = step;
  out.valid_loss = std::numeric_limits<double>::quiet_NaN();
  out.source_count = ckpts.size();
  return out;
}

Selection select_best(const std::vector<ModelCheckpoint>& ckpts, std::size_t n) {
  for (const auto& c : ckpts)
    require(!std::isnan(c.valid_loss), "select_best: checkpoint without validation loss");
  std::vector<std::size_t> order(ckpts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ckpts[a].valid_loss != ckpts[b].valid_loss) return ckpts[a].valid_loss < ckpts[b].valid_loss;
    return ckpts[a].step < ckpts[b].step;
  });
  Selection sel;
  sel.short_list = n > ckpts.size();
  const std::size_t take = std::min(n, ckpts.size());
  for (std::size_t i = 0; i < take; ++i) sel.chosen.push_back(ckpts[order[i]]);
  return sel;
}

}  // namespace xmts::nnet
