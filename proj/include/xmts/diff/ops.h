// xmts/include/xmts/diff/ops.h

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
#include <vector>

#include "xmts/diff/graph.h"

namespace xmts::diff {

// Per-position validity flags; an empty mask means every position is valid.
using ValidMask = std::vector<std::uint8_t>;

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
// a (R x C) + bias broadcast over rows; bias has C entries.
Var add_row(Var a, Var bias);

Var matmul(Var a, Var b);     // (R x K)(K x C)
Var matmul_nt(Var a, Var b);  // (R x K)(C x K)^T
Var transpose(Var a);

Var gelu(Var a);
Var relu(Var a);
Var abs(Var a);
Var square(Var a);

Var sum(Var a);
Var mean(Var a);

Var log_softmax_rows(Var a);
// Row-wise softmax restricted to valid keys (and j <= i when causal).
// Masked keys receive exactly zero weight.
Var softmax_rows(Var a, const ValidMask& key_valid = {}, bool causal = false);
Var layer_norm_rows(Var x, Var gamma, Var beta, double eps = 1e-5);

Var slice_cols(Var a, std::size_t start, std::size_t len);
Var concat_cols(const std::vector<Var>& parts);
Var slice_rows(Var a, std::size_t start, std::size_t len);
Var concat_rows(const std::vector<Var>& parts);

// Concatenates `factor` consecutive rows into one; the last group is
// zero-padded. Output has ceil(R / factor) rows and factor * C columns.
Var stack_rows(Var a, std::size_t factor);

// Mean over valid rows -> 1 x C.
Var mean_rows(Var a, const ValidMask& valid = {});

// Rows of `table` selected by ids -> len(ids) x C.
Var gather_rows(Var table, const std::vector<int>& ids);

// Sum over rows of -logp[r][targets[r]].
Var nll_rows(Var logp, const std::vector<int>& targets);

// Cosine similarity of two equal-width rows. Norms are floored at `floor`;
// `floored` (optional) is set when the floor was hit.
Var cosine_similarity(Var a, Var b, double floor = 1e-8, bool* floored = nullptr);

// One-hot of the row-wise argmax. Has no gradient; marks the graph as
// non-differentiable so finite-difference checks refuse it.
Var argmax_onehot(Var a);

}  // namespace xmts::diff
