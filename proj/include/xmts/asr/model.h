// xmts/include/xmts/asr/model.h

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

#include "xmts/nnet/transformer.h"
#include "xmts/synth/vocab.h"

namespace xmts::asr {

using diff::Graph;
using diff::ParamSet;
using diff::Tensor;
using diff::Var;
using synth::TokenSequence;
using synth::Vocab;

struct AsrConfig {
  std::size_t frame_dim = 8;
  nnet::TransformerConfig encoder{16, 2, 32, 4};
  std::size_t decoder_layers = 2;
};

// Two stack-and-project stages: concatenate 2 consecutive frames (zero pad
// at the end), project to D, GELU. T frames become ceil(ceil(T/2)/2).
void init_frontend(ParamSet& ps, const std::string& prefix, std::size_t frame_dim,
                   std::size_t dim, Rng& rng);
Var apply_frontend(Graph& g, const std::string& prefix, Var frames);
std::size_t subsampled_length(std::size_t frames);

/// Parameters live under asr.frontend.*, asr.encoder.layer{i}.*,
/// asr.ctc_head.* and asr.decoder.*.
struct AsrModel {
  AsrConfig config;
  ParamSet params;

  static AsrModel create(const AsrConfig& cfg, std::uint64_t seed);
  nnet::TransformerStack encoder_stack() const;
};

// Frontend, positions, encoder stack -> T_e x D.
Var asr_encode(const AsrConfig& cfg, Graph& g, Var frames);
// T_e x V unnormalized CTC scores.
Var ctc_logits(Graph& g, Var encoded);
// Teacher-forced decoder scores: one row per input token, width V.
Var decoder_logits(const AsrConfig& cfg, Graph& g, Var encoded, const TokenSequence& inputs);

}  // namespace xmts::asr
