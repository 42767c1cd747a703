// xmts/src/slu/distill.cc

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

#include "xmts/slu/distill.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "xmts/diff/adam.h"
#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"
#include "xmts/nnet/batch.h"

namespace xmts::slu {

const char* distance_name(DistanceKind k) {
  switch (k) {
    case DistanceKind::kCosine: return "cosine";
    case DistanceKind::kL2: return "L2";
    case DistanceKind::kL1: return "L1";
  }
  return "?";
}

DistanceKind parse_distance(const std::string& s) {
  if (s == "cosine") return DistanceKind::kCosine;
  if (s == "L2" || s == "l2") return DistanceKind::kL2;
  if (s == "L1" || s == "l1") return DistanceKind::kL1;
  throw ContractViolation("unknown distance kind '" + s + "' (expected cosine, L2 or L1)");
}

Var distance(Var a, Var b, DistanceKind kind, bool* floored) {
  require(a.value().size() == b.value().size(),
          "distance: width mismatch " + std::to_string(a.value().size()) + " vs " +
              std::to_string(b.value().size()));
  Graph& g = a.graph();
  switch (kind) {
    case DistanceKind::kCosine:
      return diff::sub(g.constant(Tensor::scalar(1.0)), diff::cosine_similarity(a, b, 1e-8, floored));
    case DistanceKind::kL2:
      return diff::mean(diff::square(diff::sub(a, b)));
    case DistanceKind::kL1:
      return diff::mean(diff::abs(diff::sub(a, b)));
  }
  throw ContractViolation("distance: bad kind");
}

double distance_value(const Embedding& a, const Embedding& b, DistanceKind kind) {
  Graph g;
  return distance(g.constant(Tensor::row(a)), g.constant(Tensor::row(b)), kind).value().item();
}

nnet::FreezeMask distill_mask(const StudentConfig& cfg, std::size_t k, std::size_t m) {
  require(k <= cfg.encoder.layers, "distill: k=" + std::to_string(k) + " exceeds encoder depth " +
                                       std::to_string(cfg.encoder.layers));
  require(m <= cfg.nlu.layers, "distill: m=" + std::to_string(m) + " exceeds NLU depth " +
                                   std::to_string(cfg.nlu.layers));
  nnet::FreezeMask mask{{kBridge}};
  for (std::size_t i = cfg.encoder.layers - k; i < cfg.encoder.layers; ++i)
    mask.trainable_prefixes.push_back(student_encoder_layer(i));
  for (std::size_t i = 0; i < m; ++i) mask.trainable_prefixes.push_back(student_nlu_layer(i));
  return mask;
}

Var default_route(const StudentModel& s, Graph& g, const synth::Corpus& c, std::size_t i) {
  return student_embed_var(s.config, g, g.constant(c.utterances[i].frames));
}

namespace {

std::vector<Embedding> teacher_targets(const nlu::NluModel& teacher, const synth::Corpus& c) {
  std::vector<synth::TokenSequence> texts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) texts[i] = c.teacher_tokens(i);
  return nlu::sentence_embed_all(teacher, texts);
}

Var item_distance(const StudentModel& s, Graph& g, const synth::Corpus& c, std::size_t i,
                  const Embedding& target, DistanceKind kind, const StudentRoute& route) {
  return distance(route(s, g, c, i), g.constant(Tensor::row(target)), kind);
}

}  // namespace

double corpus_distance(const StudentModel& s, const std::vector<Embedding>& targets,
                       const synth::Corpus& corpus, DistanceKind kind, const StudentRoute& route) {
  require(corpus.size() > 0 && targets.size() == corpus.size(),
          "corpus_distance: targets do not match the corpus");
  auto d = nnet::batch_forward(s.params, corpus.size(), [&](std::size_t i, Graph& g) {
    return item_distance(s, g, corpus, i, targets[i], kind, route);
  });
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(corpus.size());
}

DistillResult distill(const StudentModel& student, const nlu::NluModel& teacher,
                      const synth::Corpus& train, const synth::Corpus& valid,
                      const DistillConfig& cfg, const StudentRoute& route) {
  require(train.size() > 0 && valid.size() > 0, "distill: train and valid corpora must be nonempty");
  require(cfg.batch_size > 0, "distill: batch_size must be positive");
  require(teacher.dim() == student.config.nlu.dim,
          "distill: teacher width " + std::to_string(teacher.dim()) +
              " != student width " + std::to_string(student.config.nlu.dim));

  const std::uint64_t teacher_sum = teacher.params.checksum();
  const auto train_targets = teacher_targets(teacher, train);
  const auto valid_targets = teacher_targets(teacher, valid);

  DistillResult res;
  res.student = student;
  distill_mask(student.config, cfg.asr_layers_to_tune, cfg.nlu_layers_to_tune)
      .apply(res.student.params);
  res.trainable_scalars = res.student.params.scalar_count(/*trainable_only=*/true);
  const std::uint64_t frozen_sum = res.student.params.checksum(/*frozen_only=*/true);

  res.metrics.push_back({0, std::numeric_limits<double>::quiet_NaN(),
                         corpus_distance(res.student, valid_targets, valid, cfg.objective, route),
                         0.0});

  diff::AdamState adam;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    const ParamSet before_epoch = res.student.params;
    const diff::AdamState adam_before = adam;
    const std::size_t steps_before = res.steps;
    double total = 0.0, lr = 0.0;
    try {
      for (std::size_t b = 0; b < order.size(); b += cfg.batch_size) {
        const std::size_t n = std::min(cfg.batch_size, order.size() - b);
        auto bg = nnet::batch_forward_backward(
            res.student.params, n,
            [&](std::size_t i, Graph& g) {
              const std::size_t u = order[b + i];
              return item_distance(res.student, g, train, u, train_targets[u], cfg.objective, route);
            },
            1.0 / static_cast<double>(n));
        if (!std::isfinite(bg.loss_sum)) throw NumericFault("distill", "non-finite batch loss");
        lr = nnet::noam_lr(cfg.schedule, ++res.steps);
        diff::adam_step(res.student.params, bg.grads, adam, lr);
        total += bg.loss_sum;
      }
    } catch (const NumericFault& e) {
      res.student.params = before_epoch;
      adam = adam_before;
      res.steps = steps_before;
      res.aborted = true;
      res.abort_reason = e.what();
      break;
    }
    res.student.params.quantize_f32();
    res.metrics.push_back(
        {epoch, total / static_cast<double>(train.size()),
         corpus_distance(res.student, valid_targets, valid, cfg.objective, route), lr});
  }

  if (teacher.params.checksum() != teacher_sum)
    throw InvariantBreach("distill: teacher parameters changed during distillation");
  if (res.student.params.checksum(/*frozen_only=*/true) != frozen_sum)
    throw InvariantBreach("distill: frozen student parameters changed during distillation");
  return res;
}

std::vector<AblationRow> layer_ablation(const StudentModel& student, const nlu::NluModel& teacher,
                                        const synth::Corpus& train, const synth::Corpus& valid,
                                        const std::vector<std::size_t>& ks,
                                        const std::vector<std::size_t>& ms,
                                        const DistillConfig& base) {
  std::set<std::pair<std::size_t, std::size_t>> combos;
  for (std::size_t k : ks)
    for (std::size_t m : ms) combos.emplace(k, m);
  std::vector<AblationRow> rows;
  for (const auto& [k, m] : combos) {
    DistillConfig cfg = base;
    cfg.asr_layers_to_tune = k;
    cfg.nlu_layers_to_tune = m;
    auto r = distill(student, teacher, train, valid, cfg);
    rows.push_back({k, m, r.metrics.back().valid_distance, r.trainable_scalars, r.metrics});
  }
  return rows;
}

}  // namespace xmts::slu
