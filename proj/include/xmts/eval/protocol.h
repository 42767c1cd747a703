// xmts/include/xmts/eval/protocol.h

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

#include "xmts/asr/model.h"
#include "xmts/eval/classifier.h"
#include "xmts/slu/student.h"
#include "xmts/synth/corpus.h"

namespace xmts::eval {

std::vector<int> corpus_labels(const synth::Corpus& c);
std::vector<std::string> corpus_ids(const synth::Corpus& c);
std::vector<Embedding> teacher_embeddings(const nlu::NluModel& teacher, const synth::Corpus& c);
std::vector<Embedding> student_embeddings(const slu::StudentModel& s, const synth::Corpus& c);

// ASR greedy decode -> teacher embedding of the hypothesis -> classifier.
// An empty hypothesis is embedded as a single <pad> token and flagged.
EvalResult pipeline_baseline(const asr::AsrModel& asr, const nlu::NluModel& teacher,
                             const Classifier& clf, const synth::Corpus& test);

// Classifier applied to student embeddings of the frames.
EvalResult zero_shot(const slu::StudentModel& student, const Classifier& clf,
                     const synth::Corpus& test);

enum class FewshotMode { kOutputOnly, kOutputPlusEncoderLayers };
const char* fewshot_mode_name(FewshotMode m);
FewshotMode parse_fewshot_mode(const std::string& s);

struct FewshotConfig {
  std::size_t steps = 300;
  double lr = 1e-3;
  std::size_t encoder_layers = 2;  // top layers trained in the encoder mode
  std::uint64_t seed = 1;
};

// First n utterances of each class in a seed-shuffled order of `train`.
std::vector<std::size_t> fewshot_sample(const synth::Corpus& train, int num_classes, std::size_t n,
                                        std::uint64_t seed);

struct FewshotResult {
  slu::StudentModel student;
  Classifier classifier;
  std::vector<std::size_t> sample;
  std::vector<double> step_loss;
};

// Continues training the zero-shot classifier end to end through the student
// on n labeled utterances per class. Output-only mode keeps every student
// parameter frozen; the encoder mode also trains the top encoder layers.
FewshotResult fewshot_finetune(const slu::StudentModel& student, const Classifier& clf,
                               const synth::Corpus& train, std::size_t n, FewshotMode mode,
                               const FewshotConfig& cfg);

struct Bucket {
  double lo = 0.0, hi = 0.0;  // percentage points, half-open [lo, hi)
  std::size_t count = 0;
  std::size_t pipeline_correct = 0;
  std::size_t e2e_correct = 0;
  double pipeline_acc() const;  // NaN for an empty bucket
  double e2e_acc() const;
};

struct BucketReport {
  double width = 10.0;
  std::vector<Bucket> buckets;  // contiguous from 0 up to the bucket holding WER 100%
  std::size_t excluded = 0;     // WER above 100%
  std::size_t total = 0;
};

// Index of the bucket holding `wer` (a ratio), half-open intervals.
std::size_t bucket_index(double wer, double width);

BucketReport wer_bucket_report(const EvalResult& pipeline, const EvalResult& endtoend,
                               double width = 10.0);

// CSV columns: bucket_lo, bucket_hi, count, pipeline_acc, e2e_acc; a final
// row labelled "excluded" carries the count of utterances above 100% WER.
std::string bucket_csv(const BucketReport& r);
void write_text(const std::string& path, const std::string& text);
// One JSON object per utterance record, then one summary line.
std::string eval_jsonl(const EvalResult& r, const std::string& tag);

}  // namespace xmts::eval
