// xmts/src/asr/loss.cc

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

#include "xmts/asr/loss.h"

#include "xmts/asr/ctc.h"
#include "xmts/diff/errors.h"

namespace xmts::asr {

void JointLossConfig::validate() const {
  require(ctc_weight >= 0.0 && ctc_weight <= 1.0, "joint loss: ctc_weight must be in [0, 1]");
  require(label_smoothing >= 0.0 && label_smoothing < 1.0,
          "joint loss: label_smoothing must be in [0, 1)");
}

TokenSequence decoder_inputs(const TokenSequence& tokens) {
  TokenSequence in{Vocab::kSos};
  in.insert(in.end(), tokens.begin(), tokens.end());
  return in;
}

TokenSequence decoder_targets(const TokenSequence& tokens) {
  TokenSequence out = tokens;
  out.push_back(Vocab::kEos);
  return out;
}

Var smoothed_cross_entropy(Var logits, const TokenSequence& targets, double eps) {
  Var logp = diff::log_softmax_rows(logits);
  Var nll = diff::nll_rows(logp, targets);
  if (eps == 0.0) return nll;
  const double v = static_cast<double>(logits.value().cols());
  Var uniform = diff::scale(diff::sum(logp), -1.0 / v);
  return diff::add(diff::scale(nll, 1.0 - eps), diff::scale(uniform, eps));
}

JointLoss joint_asr_loss(const AsrConfig& cfg, Graph& g, Var frames, const TokenSequence& tokens,
                         const JointLossConfig& lc) {
  lc.validate();
  require(!tokens.empty(), "joint_asr_loss: empty transcript");
  Var enc = asr_encode(cfg, g, frames);
  JointLoss out;
  Var ctc, ce;
  if (lc.ctc_weight > 0.0) {
    ctc = ctc_loss(diff::log_softmax_rows(ctc_logits(g, enc)), tokens);
    out.ctc = ctc.value().item();
  }
  if (lc.ctc_weight < 1.0) {
    Var logits = decoder_logits(cfg, g, enc, decoder_inputs(tokens));
    ce = smoothed_cross_entropy(logits, decoder_targets(tokens), lc.label_smoothing);
    out.ce = ce.value().item();
  }
  if (!ce.valid()) {
    out.total = ctc;
  } else if (!ctc.valid()) {
    out.total = ce;
  } else {
    out.total = diff::add(diff::scale(ctc, lc.ctc_weight), diff::scale(ce, 1.0 - lc.ctc_weight));
  }
  return out;
}

}  // namespace xmts::asr
