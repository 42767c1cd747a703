// xmts/src/asr/train.cc

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

#include "xmts/asr/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xmts/diff/adam.h"
#include "xmts/diff/errors.h"
#include "xmts/nnet/averaging.h"
#include "xmts/nnet/batch.h"

namespace xmts::asr {

namespace {

std::size_t target_count(const synth::Corpus& c, const std::vector<std::size_t>& idx) {
  std::size_t n = 0;
  for (std::size_t i : idx) n += c.utterances[i].tokens.size() + 1;
  return n;
}

}  // namespace

double asr_corpus_loss(const AsrModel& model, const synth::Corpus& corpus,
                       const JointLossConfig& lc) {
  require(corpus.size() > 0, "asr_corpus_loss: empty corpus");
  auto losses = nnet::batch_forward(model.params, corpus.size(), [&](std::size_t i, Graph& g) {
    const auto& u = corpus.utterances[i];
    return joint_asr_loss(model.config, g, g.constant(u.frames), u.tokens, lc).total;
  });
  std::vector<std::size_t> all(corpus.size());
  std::iota(all.begin(), all.end(), 0);
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(target_count(corpus, all));
}

AsrTrainResult train_asr(const AsrModel& init, const synth::Corpus& train,
                         const synth::Corpus& valid, const AsrTrainConfig& cfg) {
  require(train.size() > 0 && valid.size() > 0, "train_asr: train and valid corpora must be nonempty");
  require(cfg.batch_size > 0, "train_asr: batch_size must be positive");
  cfg.loss.validate();

  AsrTrainResult res;
  res.model = init;
  if (cfg.epochs == 0) {
    res.model_valid_loss = asr_corpus_loss(init, valid, cfg.loss);
    return res;
  }

  AsrModel cur = init;
  diff::AdamState adam;
  std::uint64_t step = 0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs && !res.aborted; ++epoch) {
    Rng shuffle_rng(derive_seed(cfg.seed, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    double lr = 0.0;
    try {
      for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
        std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(b),
                                     order.begin() + static_cast<std::ptrdiff_t>(
                                                         std::min(order.size(), b + cfg.batch_size)));
        const std::size_t tokens = target_count(train, idx);
        const std::uint64_t batch_seed = derive_seed(cfg.seed, 1000003ull * epoch + b);
        auto bg = nnet::batch_forward_backward(
            cur.params, idx.size(),
            [&](std::size_t i, Graph& g) {
              const auto& u = train.utterances[idx[i]];
              Tensor frames = u.frames;
              if (cfg.spec_augment) {
                Rng rng(derive_seed(batch_seed, i));
                frames = spec_augment(u.frames, cfg.augment, rng).frames;
              }
              return joint_asr_loss(cur.config, g, g.constant(frames), u.tokens, cfg.loss).total;
            },
            1.0 / static_cast<double>(tokens));
        if (!std::isfinite(bg.loss_sum)) throw NumericFault("train_asr", "non-finite batch loss");
        lr = nnet::noam_lr(cfg.schedule, ++step);
        diff::adam_step(cur.params, bg.grads, adam, lr);
        for (const auto& [name, p] : cur.params)
          if (!p.value.all_finite()) throw NumericFault("adam_step", "parameter " + name);
        epoch_loss += bg.loss_sum;
        epoch_tokens += tokens;
      }
    } catch (const NumericFault& e) {
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }
    cur.params.quantize_f32();
    AsrEpochMetrics m;
    m.epoch = epoch;
    m.train_loss = epoch_loss / static_cast<double>(epoch_tokens);
    m.valid_loss = asr_corpus_loss(cur, valid, cfg.loss);
    m.lr = lr;
    res.metrics.push_back(m);
    res.checkpoints.push_back({cur.params, step, m.valid_loss, 1});
  }

  if (res.checkpoints.empty()) {
    res.model_valid_loss = asr_corpus_loss(init, valid, cfg.loss);
    return res;
  }
  auto sel = nnet::select_best(res.checkpoints, cfg.average_best);
  auto avg = nnet::average_checkpoints(sel.chosen);
  avg.params.quantize_f32();
  res.model.params = std::move(avg.params);
  res.averaged_from = sel.chosen.size();
  res.model_valid_loss = asr_corpus_loss(res.model, valid, cfg.loss);
  return res;
}

}  // namespace xmts::asr
