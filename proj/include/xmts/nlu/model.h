// xmts/include/xmts/nlu/model.h

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

#include "xmts/nnet/transformer.h"
#include "xmts/synth/vocab.h"

namespace xmts::nlu {

using diff::Graph;
using diff::ParamSet;
using diff::Tensor;
using diff::Var;
using synth::TokenSequence;
using synth::Vocab;

using Embedding = std::vector<double>;

struct NluConfig {
  nnet::TransformerConfig encoder{24, 3, 48, 4};
  bool prepend_cls = true;
  bool positions = true;
};

/// Parameters: nlu.embed.tokens (V x D), nlu.encoder.layer{i}.*,
/// nlu.mlm_head.* (pretraining only).
struct NluModel {
  NluConfig config;
  ParamSet params;

  static NluModel create(const NluConfig& cfg, std::uint64_t seed);
  nnet::TransformerStack encoder_stack() const;
  std::size_t dim() const { return config.encoder.dim; }
};

// Model input: optional <cls> followed by the tokens.
TokenSequence model_input(const NluConfig& cfg, const TokenSequence& tokens);

// Embedding lookup (+ positions) and the encoder stack; one row per model
// input position.
Var nlu_encode(const NluConfig& cfg, Graph& g, const TokenSequence& tokens);
// Mean over every encoded position, <cls> included -> 1 x D.
Var sentence_embed_var(const NluConfig& cfg, Graph& g, const TokenSequence& tokens);

Embedding sentence_embed(const NluModel& model, const TokenSequence& tokens);
std::vector<Embedding> sentence_embed_all(const NluModel& model,
                                          const std::vector<TokenSequence>& texts);

}  // namespace xmts::nlu
