// xmts/include/xmts/nnet/layers.h

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

#include <string>

#include "xmts/diff/ops.h"
#include "xmts/diff/random.h"

namespace xmts::nnet {

using diff::Graph;
using diff::ParamSet;
using diff::Tensor;
using diff::ValidMask;
using diff::Var;

// Affine map x * W + b with W stored as (in x out) under `prefix.weight` and
// b under `prefix.bias`. Weights use scaled-uniform (Glorot) init, biases 0.
void init_linear(ParamSet& ps, const std::string& prefix, std::size_t in, std::size_t out,
                 Rng& rng);
Var linear(Graph& g, const std::string& prefix, Var x);

void init_layer_norm(ParamSet& ps, const std::string& prefix, std::size_t dim);
Var layer_norm(Graph& g, const std::string& prefix, Var x);

// Multi-head scaled dot-product attention with q/k/v/out projections under
// prefix.{q,k,v,out}. Masked keys get zero weight.
void init_attention(ParamSet& ps, const std::string& prefix, std::size_t dim, Rng& rng);
Var multi_head_attention(Graph& g, const std::string& prefix, Var query, Var memory,
                         std::size_t heads, const ValidMask& key_valid = {},
                         bool causal = false);

// Position-wise W2 gelu(W1 x + b1) + b2 under prefix.{in,out}.
void init_feed_forward(ParamSet& ps, const std::string& prefix, std::size_t dim,
                       std::size_t inner, Rng& rng);
Var feed_forward(Graph& g, const std::string& prefix, Var x);

// Sinusoidal table: even columns sin(pos / 10000^(2i/D)), odd columns cos.
Tensor positional_encoding(std::size_t length, std::size_t dim);
Var add_positions(Graph& g, Var x);

}  // namespace xmts::nnet
