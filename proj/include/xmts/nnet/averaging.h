// xmts/include/xmts/nnet/averaging.h

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

#include <vector>

#include "xmts/diff/checkpoint.h"

namespace xmts::nnet {

using diff::ModelCheckpoint;

// Element-wise mean over checkpoints with identical names and shapes. For each
// element the k values are sorted before summation, so the result does not
// depend on the order of `ckpts`. The result records source_count = k, the
// largest step, and a NaN validation loss (callers re-evaluate it).
ModelCheckpoint average_checkpoints(const std::vector<ModelCheckpoint>& ckpts);

struct Selection {
  std::vector<ModelCheckpoint> chosen;
  bool short_list = false;  // n exceeded the number of candidates
};

// The n lowest-validation-loss checkpoints, ascending; ties go to the earlier
// step.
Selection select_best(const std::vector<ModelCheckpoint>& ckpts, std::size_t n);

}  // namespace xmts::nnet
