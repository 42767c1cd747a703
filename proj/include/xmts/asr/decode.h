// xmts/include/xmts/asr/decode.h

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

#include "xmts/asr/model.h"

namespace xmts::asr {

struct Hypothesis {
  TokenSequence tokens;
  bool truncated = false;  // hit the length cap before <eos>
};

// Greedy attention decoding over content tokens and <eos>; ties go to the
// lowest id. Stops at <eos> or after 2 * T / 4 + 5 tokens.
Hypothesis greedy_decode(const AsrConfig& cfg, const ParamSet& params, const Tensor& frames);
std::size_t decode_length_cap(std::size_t frames);

// Levenshtein distance with unit costs.
std::size_t edit_distance(const TokenSequence& a, const TokenSequence& b);
// edit_distance(ref, hyp) / |ref|; may exceed 1.
double word_error_rate(const TokenSequence& ref, const TokenSequence& hyp);

}  // namespace xmts::asr
