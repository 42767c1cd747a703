// xmts/src/asr/decode.cc

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

#include "xmts/asr/decode.h"

#include <algorithm>

#include "xmts/diff/errors.h"

namespace xmts::asr {

std::size_t decode_length_cap(std::size_t frames) { return 2 * frames / 4 + 5; }

Hypothesis greedy_decode(const AsrConfig& cfg, const ParamSet& params, const Tensor& frames) {
  require(frames.rows() > 0, "greedy_decode: empty input");
  Graph g(&params, /*grad_enabled=*/false);
  Var enc = asr_encode(cfg, g, g.constant(frames));
  const std::size_t cap = decode_length_cap(frames.rows());
  Hypothesis h;
  TokenSequence inputs{Vocab::kSos};
  while (true) {
    if (h.tokens.size() >= cap) {
      h.truncated = true;
      break;
    }
    Var logits = decoder_logits(cfg, g, enc, inputs);
    const Tensor& lv = logits.value();
    const std::size_t last = lv.rows() - 1;
    int best = Vocab::kEos;
    double best_score = lv(last, Vocab::kEos);
    for (int k = 0; k < Vocab::kContent; ++k)
      if (lv(last, k) > best_score || (lv(last, k) == best_score && k < best)) {
        best = k;
        best_score = lv(last, k);
      }
    if (best == Vocab::kEos) break;
    h.tokens.push_back(best);
    inputs.push_back(best);
  }
  return h;
}

std::size_t edit_distance(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double word_error_rate(const TokenSequence& ref, const TokenSequence& hyp) {
  require(!ref.empty(), "word_error_rate: empty reference");
  return static_cast<double>(edit_distance(ref, hyp)) / static_cast<double>(ref.size());
}

}  // namespace xmts::asr
