// xmts/include/xmts/nnet/transformer.h

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
#include <vector>

#include "xmts/nnet/layers.h"

namespace xmts::nnet {

struct TransformerConfig {
  std::size_t dim = 16;
  std::size_t heads = 2;
  std::size_t ffn_dim = 32;
  std::size_t layers = 4;

  void validate() const;
};

// 4D^2 + 4D (attention) + 2DF + F + D (feed-forward) + 4D (two layer norms).
std::size_t transformer_layer_param_count(const TransformerConfig& cfg);
inline std::size_t transformer_param_count(const TransformerConfig& cfg) {
  return cfg.layers * transformer_layer_param_count(cfg);
}

/// Stack of post-norm encoder blocks:
///   x = LN1(x + MHA(x)); x = LN2(x + FFN(x))
/// Parameters live in a ParamSet under "<prefix>.layer{i}.*".
class TransformerStack {
 public:
  TransformerStack(std::string prefix, TransformerConfig cfg);

  const std::string& prefix() const { return prefix_; }
  const TransformerConfig& config() const { return cfg_; }
  std::string layer_prefix(std::size_t i) const;

  void init(ParamSet& ps, Rng& rng) const;

  // `x` must already carry position information. Output length equals input
  // length; masked positions never influence valid ones.
  Var encode(Graph& g, Var x, const ValidMask& mask = {}) const;
  Var encode_layer(Graph& g, std::size_t layer, Var x, const ValidMask& mask = {}) const;

 private:
  std::string prefix_;
  TransformerConfig cfg_;
};

struct EncodedSequence {
  Tensor vectors;
  ValidMask mask;  // empty: all valid
};

// Inference-only convenience wrapper over TransformerStack::encode.
EncodedSequence transformer_encode(const TransformerStack& stack, const ParamSet& params,
                                   const Tensor& input, const ValidMask& mask = {});

// Arithmetic mean of the valid rows.
std::vector<double> mean_pool(const EncodedSequence& enc);

}  // namespace xmts::nnet
