// xmts/include/xmts/asr/loss.h

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

struct JointLossConfig {
  double ctc_weight = 0.3;
  double label_smoothing = 0.0;
  void validate() const;
};

struct JointLoss {
  Var total;
  // Component values; a component skipped because its weight is 0 reads 0.
  double ctc = 0.0;
  double ce = 0.0;
};

// Decoder input [<sos> y] and target [y <eos>].
TokenSequence decoder_inputs(const TokenSequence& tokens);
TokenSequence decoder_targets(const TokenSequence& tokens);

// Sum of per-position cross-entropies; with smoothing eps the target is
// (1 - eps) one-hot + eps uniform over the vocabulary.
Var smoothed_cross_entropy(Var logits, const TokenSequence& targets, double eps);

// lambda * CTC + (1 - lambda) * CE for one utterance (both summed over the
// utterance). Throws InfeasibleAlignment when the CTC term cannot align.
JointLoss joint_asr_loss(const AsrConfig& cfg, Graph& g, Var frames, const TokenSequence& tokens,
                         const JointLossConfig& lc);

}  // namespace xmts::asr
