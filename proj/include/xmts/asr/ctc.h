// xmts/include/xmts/asr/ctc.h

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

#include <stdexcept>

#include "xmts/diff/graph.h"
#include "xmts/synth/vocab.h"

namespace xmts::asr {

// The target needs more frames than the input provides.
class InfeasibleAlignment : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Frames needed to emit `target`: one per label plus a blank between each
// pair of equal adjacent labels.
std::size_t ctc_min_frames(const synth::TokenSequence& target);

/// -log sum over all CTC alignments of `target` under per-frame log
/// probabilities (T x V, rows normalized). Forward/backward recursions over
/// the blank-interleaved label sequence, in log space.
diff::Var ctc_loss(diff::Var logprobs, const synth::TokenSequence& target,
                   int blank = synth::Vocab::kBlank);

}  // namespace xmts::asr
