// xmts/src/nlu/pairs.cc

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

#include "xmts/nlu/pairs.h"

#include <atomic>
#include <cmath>
#include <set>

#include "xmts/diff/adam.h"
#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"
#include "xmts/nnet/batch.h"
#include "xmts/synth/corpus.h"

namespace xmts::nlu {

namespace {

const char* kHead = "nli_head";

int other_template(int cls, int num_templates, bool same_group, Rng& rng) {
  std::vector<int> pool;
  for (int c = 0; c < num_templates; ++c)
    if (c != cls && (synth::template_group(c) == synth::template_group(cls)) == same_group)
      pool.push_back(c);
  require(!pool.empty(), "pair generator: no template satisfies the relation");
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

template <class ItemFn>
PairTrainResult run_pair_training(const NluModel& init, const std::vector<SentencePair>& pairs,
                                  const PairTrainConfig& cfg, ParamSet head, ItemFn item) {
  require(cfg.batch_size > 0, "pair fine-tuning: batch_size must be positive");
  PairTrainResult res{init, head, {}, 0.0, false, 0};
  ParamSet joint = init.params;
  joint.merge(head);
  // The MLM head plays no part in pair training.
  for (const auto& name : joint.names())
    if (diff::name_under(name, "nlu.mlm_head")) joint.set_trainable(name, false);

  {
    auto losses = nnet::batch_forward(joint, pairs.size(), [&](std::size_t i, Graph& g) {
      return item(g, pairs[i], nullptr);
    });
    double s = 0.0;
    for (double l : losses) s += l;
    res.initial_loss = s / static_cast<double>(pairs.size());
  }

  diff::AdamState adam;
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::atomic<std::size_t> floored{0};
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    Rng rng(derive_seed(cfg.seed, step));
    std::vector<std::size_t> idx(cfg.batch_size);
    for (auto& i : idx) i = pick(rng);
    auto bg = nnet::batch_forward_backward(
        joint, idx.size(),
        [&](std::size_t i, Graph& g) {
          bool f = false;
          Var l = item(g, pairs[idx[i]], &f);
          if (f) ++floored;
          return l;
        },
        1.0 / static_cast<double>(idx.size()));
    if (!std::isfinite(bg.loss_sum)) throw NumericFault("pair fine-tuning", "non-finite loss");
    diff::adam_step(joint, bg.grads, adam, nnet::noam_lr(cfg.schedule, step));
    res.step_loss.push_back(bg.loss_sum / static_cast<double>(idx.size()));
  }
  joint.quantize_f32();
  for (const auto& [name, p] : joint) {
    if (res.model.params.contains(name)) {
      res.model.params.mutable_value(name) = p.value;
    } else {
      res.head.mutable_value(name) = p.value;
    }
  }
  res.floored_norms = floored.load();
  return res;
}

}  // namespace

std::vector<SentencePair> generate_nli_pairs(std::size_t count, std::uint64_t seed,
                                             int num_templates) {
  require(num_templates >= 4 && num_templates <= synth::kMaxClasses,
          "generate_nli_pairs: need between 4 and 8 templates");
  std::vector<SentencePair> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    const int a = std::uniform_int_distribution<int>(0, num_templates - 1)(rng);
    const int rel = std::uniform_int_distribution<int>(0, kNliClasses - 1)(rng);
    int b = a;
    if (rel == kNeutral) b = other_template(a, num_templates, true, rng);
    if (rel == kContradiction) b = other_template(a, num_templates, false, rng);
    out[i].a = synth::sample_class_sentence(a, rng);
    out[i].b = synth::sample_class_sentence(b, rng);
    out[i].label = rel;
  }
  return out;
}

std::vector<SentencePair> generate_sts_pairs(std::size_t count, std::uint64_t seed,
                                             int num_templates) {
  require(num_templates >= 2 && num_templates <= synth::kMaxClasses,
          "generate_sts_pairs: template count out of range");
  std::vector<SentencePair> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    const int a = std::uniform_int_distribution<int>(0, num_templates - 1)(rng);
    int b = a;
    if (i % 2) {
      b = std::uniform_int_distribution<int>(0, num_templates - 2)(rng);
      if (b >= a) ++b;
    }
    out[i].a = synth::sample_class_sentence(a, rng);
    out[i].b = synth::sample_class_sentence(b, rng);
    out[i].similarity = a == b ? 1.0 : 0.0;
  }
  return out;
}

Var pair_logits(const NluConfig& cfg, Graph& g, const SentencePair& p) {
  Var u = sentence_embed_var(cfg, g, p.a);
  Var v = sentence_embed_var(cfg, g, p.b);
  Var feats = diff::concat_cols({u, v, diff::abs(diff::sub(u, v))});
  return nnet::linear(g, kHead, feats);
}

Var similarity_loss(const NluConfig& cfg, Graph& g, const SentencePair& p, bool* floored) {
  require(p.similarity.has_value(), "similarity_loss: pair has no similarity target");
  Var u = sentence_embed_var(cfg, g, p.a);
  Var v = sentence_embed_var(cfg, g, p.b);
  Var cos = diff::cosine_similarity(u, v, 1e-8, floored);
  return diff::square(diff::sub(cos, g.constant(Tensor::scalar(*p.similarity))));
}

PairTrainResult finetune_pairs_classify(const NluModel& init, const std::vector<SentencePair>& pairs,
                                        const PairTrainConfig& cfg) {
  require(!pairs.empty(), "finetune_pairs_classify: no pairs");
  std::set<int> labels;
  for (const auto& p : pairs) {
    require(p.label.has_value() && *p.label >= 0 && *p.label < kNliClasses,
            "finetune_pairs_classify: every pair needs a class label");
    labels.insert(*p.label);
  }
  ParamSet head;
  const std::size_t d = init.dim();
  head.add(std::string(kHead) + ".weight", Tensor::matrix(3 * d, kNliClasses, 0.0));
  head.add(std::string(kHead) + ".bias", Tensor(diff::Shape{kNliClasses}, 0.0));
  auto res = run_pair_training(init, pairs, cfg, head,
                               [&](Graph& g, const SentencePair& p, bool*) {
                                 return diff::nll_rows(diff::log_softmax_rows(pair_logits(init.config, g, p)),
                                                       {*p.label});
                               });
  res.degenerate = labels.size() < 2;
  return res;
}

double pair_accuracy(const NluModel& model, const ParamSet& head,
                     const std::vector<SentencePair>& pairs) {
  require(!pairs.empty(), "pair_accuracy: no pairs");
  ParamSet joint = model.params;
  joint.merge(head);
  std::vector<int> correct(pairs.size(), 0);
  kernels::parallel_for(pairs.size(), [&](std::size_t i) {
    Graph g(&joint, false);
    const Tensor& l = pair_logits(model.config, g, pairs[i]).value();
    int best = 0;
    for (int c = 1; c < kNliClasses; ++c)
      if (l[static_cast<std::size_t>(c)] > l[static_cast<std::size_t>(best)]) best = c;
    correct[i] = best == pairs[i].label.value();
  });
  double hits = 0.0;
  for (int c : correct) hits += c;
  return hits / static_cast<double>(pairs.size());
}

PairTrainResult finetune_pairs_similarity(const NluModel& init,
                                          const std::vector<SentencePair>& pairs,
                                          const PairTrainConfig& cfg) {
  require(!pairs.empty(), "finetune_pairs_similarity: no pairs");
  for (const auto& p : pairs)
    require(p.similarity.has_value() && *p.similarity >= -1.0 && *p.similarity <= 1.0,
            "finetune_pairs_similarity: every pair needs a target in [-1, 1]");
  return run_pair_training(init, pairs, cfg, ParamSet(),
                           [&](Graph& g, const SentencePair& p, bool* floored) {
                             return similarity_loss(init.config, g, p, floored);
                           });
}

}  // namespace xmts::nlu
