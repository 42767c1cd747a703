// xmts/include/xmts/slu/distill.h

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

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "xmts/nnet/freeze.h"
#include "xmts/nnet/schedule.h"
#include "xmts/slu/student.h"
#include "xmts/synth/corpus.h"

namespace xmts::slu {

enum class DistanceKind { kCosine, kL2, kL1 };
const char* distance_name(DistanceKind k);
DistanceKind parse_distance(const std::string& s);

// cosine: 1 - cos(a, b); L2: mean (a_i - b_i)^2; L1: mean |a_i - b_i|.
// Computed symmetrically, so distance(a, b) == distance(b, a) exactly.
Var distance(Var a, Var b, DistanceKind kind, bool* floored = nullptr);
double distance_value(const Embedding& a, const Embedding& b, DistanceKind kind);

struct DistillConfig {
  DistanceKind objective = DistanceKind::kL1;
  std::size_t asr_layers_to_tune = 2;  // k: top encoder layers
  std::size_t nlu_layers_to_tune = 0;  // m: bottom NLU layers
  nnet::LrSchedule schedule{100, 0.1, 24};
  std::size_t epochs = 30;
  std::size_t batch_size = 4;
  std::uint64_t seed = 1;
};

// Bridge, encoder layers L-k..L-1 and NLU layers 0..m-1.
nnet::FreezeMask distill_mask(const StudentConfig& cfg, std::size_t k, std::size_t m);

struct DistillEpoch {
  std::size_t epoch = 0;
  double train_distance = 0.0;  // NaN for epoch 0
  double valid_distance = 0.0;
  double lr = 0.0;
};

// Thrown when a parameter that must not move did.
class InvariantBreach : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct DistillResult {
  StudentModel student;
  std::vector<DistillEpoch> metrics;
  std::size_t trainable_scalars = 0;
  std::size_t steps = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Student side of the objective for utterance i of `corpus`. The default
// route runs student_embed on the frames; tests substitute other routes.
using StudentRoute =
    std::function<Var(const StudentModel&, Graph&, const synth::Corpus&, std::size_t)>;
Var default_route(const StudentModel& s, Graph& g, const synth::Corpus& c, std::size_t i);

// Matches pooled student utterance embeddings to frozen teacher sentence
// embeddings of the transcripts. No augmentation is applied.
DistillResult distill(const StudentModel& student, const nlu::NluModel& teacher,
                      const synth::Corpus& train, const synth::Corpus& valid,
                      const DistillConfig& cfg, const StudentRoute& route = default_route);

// Mean distance over a corpus.
double corpus_distance(const StudentModel& s, const std::vector<Embedding>& targets,
                       const synth::Corpus& corpus, DistanceKind kind,
                       const StudentRoute& route = default_route);

struct AblationRow {
  std::size_t k = 0, m = 0;
  double valid_distance = 0.0;
  std::size_t trainable_scalars = 0;
  std::vector<DistillEpoch> metrics;
};

// One distill run per distinct (k, m), sorted by (k, m).
std::vector<AblationRow> layer_ablation(const StudentModel& student, const nlu::NluModel& teacher,
                                        const synth::Corpus& train, const synth::Corpus& valid,
                                        const std::vector<std::size_t>& ks,
                                        const std::vector<std::size_t>& ms,
                                        const DistillConfig& base);

}  // namespace xmts::slu
