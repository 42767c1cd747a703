// xmts/src/nlu/pretrain.cc

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

#include "xmts/nlu/pretrain.h"

#include <cmath>

#include "xmts/diff/adam.h"
#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"
#include "xmts/nnet/batch.h"

namespace xmts::nlu {

MaskedText mask_tokens(const TokenSequence& tokens, double mask_prob, Rng& rng) {
  require(mask_prob >= 0.0 && mask_prob <= 1.0, "mask_tokens: probability out of range");
  std::bernoulli_distribution coin(mask_prob);
  MaskedText m;
  m.corrupted = tokens;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!Vocab::is_content(tokens[i]) || !coin(rng)) continue;
    m.corrupted[i] = Vocab::kMask;
    m.positions.push_back(static_cast<int>(i));
    m.originals.push_back(tokens[i]);
  }
  return m;
}

Var mlm_loss(const NluConfig& cfg, Graph& g, const MaskedText& m) {
  require(!m.positions.empty(), "mlm_loss: nothing is masked");
  Var enc = nlu_encode(cfg, g, m.corrupted);
  const int offset = cfg.prepend_cls ? 1 : 0;
  std::vector<int> rows;
  for (int p : m.positions) rows.push_back(p + offset);
  Var picked = diff::concat_rows([&] {
    std::vector<Var> parts;
    for (int r : rows) parts.push_back(diff::slice_rows(enc, static_cast<std::size_t>(r), 1));
    return parts;
  }());
  Var logits = nnet::linear(g, "nlu.mlm_head", picked);
  return diff::nll_rows(diff::log_softmax_rows(logits), m.originals);
}

MlmResult mlm_pretrain(const NluModel& init, const std::vector<TokenSequence>& texts,
                       const MlmConfig& cfg) {
  require(cfg.batch_size > 0, "mlm_pretrain: batch_size must be positive");
  MlmResult res{init, {}, 0};
  if (cfg.steps == 0) return res;
  require(!texts.empty(), "mlm_pretrain: no texts");
  bool any_content = false;
  for (const auto& t : texts)
    for (int tok : t) any_content = any_content || Vocab::is_content(tok);
  require(any_content && cfg.mask_prob > 0.0, "mlm_pretrain: nothing can ever be masked");

  diff::AdamState adam;
  std::uniform_int_distribution<std::size_t> pick(0, texts.size() - 1);
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    Rng rng(derive_seed(cfg.seed, step));
    std::vector<MaskedText> batch;
    std::size_t masked = 0;
    for (int attempt = 0; masked == 0; ++attempt) {
      if (attempt > 0) ++res.resampled_batches;
      batch.clear();
      for (std::size_t b = 0; b < cfg.batch_size; ++b) {
        MaskedText m = mask_tokens(texts[pick(rng)], cfg.mask_prob, rng);
        masked += m.positions.size();
        if (!m.positions.empty()) batch.push_back(std::move(m));
      }
    }
    auto bg = nnet::batch_forward_backward(
        res.model.params, batch.size(),
        [&](std::size_t i, Graph& g) { return mlm_loss(res.model.config, g, batch[i]); },
        1.0 / static_cast<double>(masked));
    if (!std::isfinite(bg.loss_sum)) throw NumericFault("mlm_pretrain", "non-finite loss");
    diff::adam_step(res.model.params, bg.grads, adam, nnet::noam_lr(cfg.schedule, step));
    res.step_loss.push_back(bg.loss_sum / static_cast<double>(masked));
  }
  res.model.params.quantize_f32();
  return res;
}

double masked_token_accuracy(const NluModel& model, const std::vector<TokenSequence>& texts,
                             double mask_prob, std::uint64_t seed) {
  std::vector<std::size_t> hits(texts.size(), 0), totals(texts.size(), 0);
  kernels::parallel_for(texts.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    MaskedText m = mask_tokens(texts[i], mask_prob, rng);
    if (m.positions.empty()) return;
    Graph g(&model.params, false);
    Var enc = nlu_encode(model.config, g, m.corrupted);
    Var logits = nnet::linear(g, "nlu.mlm_head", enc);
    const int offset = model.config.prepend_cls ? 1 : 0;
    for (std::size_t k = 0; k < m.positions.size(); ++k) {
      const std::size_t r = static_cast<std::size_t>(m.positions[k] + offset);
      int best = 0;
      for (int c = 1; c < Vocab::kSize; ++c)
        if (logits.value()(r, c) > logits.value()(r, best)) best = c;
      hits[i] += best == m.originals[k];
      ++totals[i];
    }
  });
  std::size_t h = 0, t = 0;
  for (std::size_t i = 0; i < texts.size(); ++i) h += hits[i], t += totals[i];
  require(t > 0, "masked_token_accuracy: nothing was masked");
  return static_cast<double>(h) / static_cast<double>(t);
}

}  // namespace xmts::nlu
