// xmts/include/xmts/nlu/pretrain.h

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

#include "xmts/nlu/model.h"
#include "xmts/nnet/schedule.h"

namespace xmts::nlu {

struct MlmConfig {
  double mask_prob = 0.15;
  std::size_t steps = 1500;
  std::size_t batch_size = 16;
  nnet::LrSchedule schedule{100, 0.35, 24};
  std::uint64_t seed = 1;
};

struct MaskedText {
  TokenSequence corrupted;       // tokens with masked positions replaced
  std::vector<int> positions;    // indices into the token sequence
  std::vector<int> originals;    // target token per masked position
};

// Each content position independently replaced by <mask> with probability p.
MaskedText mask_tokens(const TokenSequence& tokens, double mask_prob, Rng& rng);

// Cross-entropy summed over the masked positions only.
Var mlm_loss(const NluConfig& cfg, Graph& g, const MaskedText& m);

struct MlmResult {
  NluModel model;
  std::vector<double> step_loss;  // mean CE per masked token
  std::size_t resampled_batches = 0;
};

// Batches whose draw masks nothing are redrawn, so no step divides by zero.
MlmResult mlm_pretrain(const NluModel& init, const std::vector<TokenSequence>& texts,
                       const MlmConfig& cfg);

// Fraction of masked positions whose argmax prediction is the original.
double masked_token_accuracy(const NluModel& model, const std::vector<TokenSequence>& texts,
                             double mask_prob, std::uint64_t seed);

}  // namespace xmts::nlu
