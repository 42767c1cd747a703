// xmts/include/xmts/nlu/pairs.h

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

#include <optional>
#include <vector>

#include "xmts/nlu/model.h"
#include "xmts/nnet/schedule.h"

namespace xmts::nlu {

enum NliLabel : int { kContradiction = 0, kEntailment = 1, kNeutral = 2 };
inline constexpr int kNliClasses = 3;

struct SentencePair {
  TokenSequence a, b;
  std::optional<int> label;          // NliLabel
  std::optional<double> similarity;  // in [-1, 1]
};

// Pairs drawn from the class templates: entailment when both sentences come
// from the same template, neutral when the templates share a group,
// contradiction otherwise. Relations are drawn uniformly.
std::vector<SentencePair> generate_nli_pairs(std::size_t count, std::uint64_t seed,
                                             int num_templates = 8);
// Similarity target 1 for the same template, 0 otherwise (half each).
std::vector<SentencePair> generate_sts_pairs(std::size_t count, std::uint64_t seed,
                                             int num_templates = 8);

struct PairTrainConfig {
  std::size_t steps = 200;
  std::size_t batch_size = 16;
  nnet::LrSchedule schedule{100, 0.1, 24};
  std::uint64_t seed = 1;
};

struct PairTrainResult {
  NluModel model;
  ParamSet head;  // classification head; not part of the returned model
  std::vector<double> step_loss;
  double initial_loss = 0.0;
  bool degenerate = false;       // only one label present
  std::size_t floored_norms = 0;  // cosine norm floor hits
};

// Logits over NLI labels from the pair head applied to (u, v, |u - v|).
Var pair_logits(const NluConfig& cfg, Graph& g, const SentencePair& p);
// (cos(u, v) - target)^2.
Var similarity_loss(const NluConfig& cfg, Graph& g, const SentencePair& p,
                    bool* floored = nullptr);

// Fine-tunes the encoder and embeddings through a zero-initialized
// classification head on concat(u, v, |u - v|).
PairTrainResult finetune_pairs_classify(const NluModel& init, const std::vector<SentencePair>& pairs,
                                        const PairTrainConfig& cfg);
double pair_accuracy(const NluModel& model, const ParamSet& head,
                     const std::vector<SentencePair>& pairs);

// Minimizes the batch mean of (cos(u, v) - target)^2.
PairTrainResult finetune_pairs_similarity(const NluModel& init,
                                          const std::vector<SentencePair>& pairs,
                                          const PairTrainConfig& cfg);

}  // namespace xmts::nlu
