// xmts/include/xmts/asr/train.h

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

#include <string>
#include <vector>

#include "xmts/asr/loss.h"
#include "xmts/asr/specaug.h"
#include "xmts/diff/checkpoint.h"
#include "xmts/nnet/schedule.h"
#include "xmts/synth/corpus.h"

namespace xmts::asr {

struct AsrTrainConfig {
  std::size_t epochs = 24;
  std::size_t batch_size = 16;
  nnet::LrSchedule schedule{200, 0.5, 16};
  JointLossConfig loss;
  bool spec_augment = true;
  SpecAugmentPolicy augment;
  std::size_t average_best = 7;
  std::uint64_t seed = 1;
};

struct AsrEpochMetrics {
  std::size_t epoch = 0;
  double train_loss = 0.0;  // nats per target token (including <eos>)
  double valid_loss = 0.0;
  double lr = 0.0;
};

struct AsrTrainResult {
  AsrModel model;  // averaged model (or the initialization for 0 epochs)
  std::vector<diff::ModelCheckpoint> checkpoints;  // one per completed epoch
  std::vector<AsrEpochMetrics> metrics;
  double model_valid_loss = 0.0;
  std::size_t averaged_from = 0;
  bool aborted = false;
  std::string abort_reason;
};

// Mean joint loss per target token over a corpus, without augmentation.
double asr_corpus_loss(const AsrModel& model, const synth::Corpus& corpus,
                       const JointLossConfig& lc);

// Per-utterance mini-batch training with Adam under the warmup schedule. A
// checkpoint is kept after every epoch; the result averages the
// `average_best` lowest-validation-loss ones. A numeric fault stops training
// and the checkpoints completed so far are used.
AsrTrainResult train_asr(const AsrModel& init, const synth::Corpus& train,
                         const synth::Corpus& valid, const AsrTrainConfig& cfg);

}  // namespace xmts::asr
