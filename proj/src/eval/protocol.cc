// xmts/src/eval/protocol.cc

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

#include "xmts/eval/protocol.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "xmts/asr/decode.h"
#include "xmts/diff/adam.h"
#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"
#include "xmts/nnet/batch.h"
#include "xmts/nnet/freeze.h"

namespace xmts::eval {

std::vector<int> corpus_labels(const synth::Corpus& c) {
  std::vector<int> out;
  out.reserve(c.size());
  for (const auto& u : c.utterances) {
    require(u.label.has_value(), "corpus_labels: utterance '" + u.id + "' has no label");
    out.push_back(*u.label);
  }
  return out;
}

std::vector<std::string> corpus_ids(const synth::Corpus& c) {
  std::vector<std::string> out;
  for (const auto& u : c.utterances) out.push_back(u.id);
  return out;
}

std::vector<Embedding> teacher_embeddings(const nlu::NluModel& teacher, const synth::Corpus& c) {
  std::vector<synth::TokenSequence> texts(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) texts[i] = c.teacher_tokens(i);
  return nlu::sentence_embed_all(teacher, texts);
}

std::vector<Embedding> student_embeddings(const slu::StudentModel& s, const synth::Corpus& c) {
  std::vector<Tensor> frames;
  frames.reserve(c.size());
  for (const auto& u : c.utterances) frames.push_back(u.frames);
  return slu::student_embed_all(s, frames);
}

EvalResult pipeline_baseline(const asr::AsrModel& asr, const nlu::NluModel& teacher,
                             const Classifier& clf, const synth::Corpus& test) {
  const std::size_t n = test.size();
  std::vector<Embedding> embs(n);
  std::vector<double> wers(n);
  std::vector<char> empty(n, 0);
  kernels::parallel_for(n, [&](std::size_t i) {
    const auto& u = test.utterances[i];
    auto hyp = asr::greedy_decode(asr.config, asr.params, u.frames).tokens;
    wers[i] = asr::word_error_rate(u.tokens, hyp);
    if (hyp.empty()) {
      empty[i] = 1;
      hyp = {synth::Vocab::kPad};
    } else if (test.rich_transcripts) {
      hyp.push_back(synth::Vocab::kMarker);
    }
    embs[i] = nlu::sentence_embed(teacher, hyp);
  });
  EvalResult r = evaluate(clf, embs, corpus_labels(test), corpus_ids(test));
  for (std::size_t i = 0; i < n; ++i) {
    r.records[i].wer = wers[i];
    r.records[i].empty_hypothesis = empty[i] != 0;
  }
  return r;
}

EvalResult zero_shot(const slu::StudentModel& student, const Classifier& clf,
                     const synth::Corpus& test) {
  return evaluate(clf, student_embeddings(student, test), corpus_labels(test), corpus_ids(test));
}

const char* fewshot_mode_name(FewshotMode m) {
  return m == FewshotMode::kOutputOnly ? "output_only" : "output_plus_encoder_layers";
}

FewshotMode parse_fewshot_mode(const std::string& s) {
  if (s == "output_only") return FewshotMode::kOutputOnly;
  if (s == "output_plus_encoder_layers") return FewshotMode::kOutputPlusEncoderLayers;
  throw ContractViolation("unknown few-shot mode '" + s + "'");
}

std::vector<std::size_t> fewshot_sample(const synth::Corpus& train, int num_classes, std::size_t n,
                                        std::uint64_t seed) {
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "fewshot"));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> taken(static_cast<std::size_t>(num_classes), 0);
  std::vector<std::size_t> out;
  for (std::size_t i : order) {
    const int l = train.utterances[i].label.value();
    require(l >= 0 && l < num_classes, "fewshot_sample: label out of range");
    if (taken[static_cast<std::size_t>(l)] < n) {
      ++taken[static_cast<std::size_t>(l)];
      out.push_back(i);
    }
  }
  for (int c = 0; c < num_classes; ++c)
    require(taken[static_cast<std::size_t>(c)] == n,
            "fewshot_sample: class " + std::to_string(c) + " has fewer than " + std::to_string(n) +
                " training utterances");
  return out;
}

FewshotResult fewshot_finetune(const slu::StudentModel& student, const Classifier& clf,
                               const synth::Corpus& train, std::size_t n, FewshotMode mode,
                               const FewshotConfig& cfg) {
  FewshotResult res{student, clf, {}, {}};
  if (n == 0) return res;
  res.sample = fewshot_sample(train, clf.num_classes, n, cfg.seed);

  nnet::FreezeMask mask;
  if (mode == FewshotMode::kOutputPlusEncoderLayers) {
    const std::size_t layers = student.config.encoder.layers;
    require(cfg.encoder_layers <= layers, "fewshot: more encoder layers than the student has");
    for (std::size_t i = layers - cfg.encoder_layers; i < layers; ++i)
      mask.trainable_prefixes.push_back(slu::student_encoder_layer(i));
  }
  ParamSet joint = student.params;
  mask.apply(joint);
  joint.merge(clf.params);
  for (const auto& [name, p] : clf.params) joint.set_trainable(name, true);

  const std::size_t count = res.sample.size();
  diff::AdamState adam;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    auto bg = nnet::batch_forward_backward(
        joint, count,
        [&](std::size_t i, diff::Graph& g) {
          const auto& u = train.utterances[res.sample[i]];
          diff::Var e = slu::student_embed_var(student.config, g, g.constant(u.frames));
          return classifier_loss(g, e, {*u.label});
        },
        1.0 / static_cast<double>(count));
    if (!std::isfinite(bg.loss_sum)) throw NumericFault("fewshot_finetune", "non-finite loss");
    diff::adam_step(joint, bg.grads, adam, cfg.lr);
    res.step_loss.push_back(bg.loss_sum / static_cast<double>(count));
  }
  joint.quantize_f32();
  for (const auto& [name, p] : joint) {
    if (res.student.params.contains(name)) {
      res.student.params.mutable_value(name) = p.value;
    } else {
      res.classifier.params.mutable_value(name) = p.value;
    }
  }
  return res;
}

double Bucket::pipeline_acc() const {
  return count ? static_cast<double>(pipeline_correct) / static_cast<double>(count) : NAN;
}
double Bucket::e2e_acc() const {
  return count ? static_cast<double>(e2e_correct) / static_cast<double>(count) : NAN;
}

std::size_t bucket_index(double wer, double width) {
  require(width > 0.0 && wer >= 0.0, "bucket_index: bad width or negative WER");
  // The epsilon keeps values like 0.1 * 100 / 10 = 0.99999... in bucket 1.
  return static_cast<std::size_t>(std::floor(wer * 100.0 / width + 1e-9));
}

BucketReport wer_bucket_report(const EvalResult& pipeline, const EvalResult& endtoend,
                               double width) {
  require(width > 0.0, "wer_bucket_report: width must be positive");
  require(pipeline.records.size() == endtoend.records.size(),
          "wer_bucket_report: results cover different utterance counts");
  std::map<std::string, const UtteranceResult*> e2e;
  for (const auto& r : endtoend.records) e2e[r.id] = &r;
  BucketReport rep;
  rep.width = width;
  rep.total = pipeline.records.size();
  rep.buckets.resize(bucket_index(1.0, width) + 1);
  for (std::size_t b = 0; b < rep.buckets.size(); ++b) {
    rep.buckets[b].lo = static_cast<double>(b) * width;
    rep.buckets[b].hi = static_cast<double>(b + 1) * width;
  }
  for (const auto& p : pipeline.records) {
    auto it = e2e.find(p.id);
    require(it != e2e.end(), "wer_bucket_report: utterance '" + p.id + "' missing from the end-to-end result");
    require(p.wer.has_value(), "wer_bucket_report: utterance '" + p.id + "' has no WER");
    if (*p.wer > 1.0) {
      ++rep.excluded;
      continue;
    }
    Bucket& b = rep.buckets[bucket_index(*p.wer, width)];
    ++b.count;
    b.pipeline_correct += p.predicted == p.label;
    b.e2e_correct += it->second->predicted == it->second->label;
  }
  return rep;
}

std::string bucket_csv(const BucketReport& r) {
  std::ostringstream os;
  os.precision(6);
  auto acc = [](double v) { return std::isnan(v) ? std::string() : std::to_string(v); };
  os << "bucket_lo,bucket_hi,count,pipeline_acc,e2e_acc\n";
  for (const auto& b : r.buckets)
    os << b.lo << ',' << b.hi << ',' << b.count << ',' << acc(b.pipeline_acc()) << ','
       << acc(b.e2e_acc()) << '\n';
  os << "excluded,," << r.excluded << ",,\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw LoadError(LoadError::Kind::kIo, "cannot open '" + path + "' for writing");
  os << text;
}

std::string eval_jsonl(const EvalResult& r, const std::string& tag) {
  std::ostringstream os;
  for (const auto& rec : r.records) {
    nlohmann::json j{{"tag", tag},
                     {"id", rec.id},
                     {"label", rec.label},
                     {"predicted", rec.predicted}};
    if (rec.wer) j["wer"] = *rec.wer;
    if (rec.empty_hypothesis) j["empty_hypothesis"] = true;
    os << j.dump() << '\n';
  }
  nlohmann::json summary{{"tag", tag},
                         {"summary", true},
                         {"accuracy", r.accuracy},
                         {"correct", r.correct},
                         {"total", r.records.size()}};
  os << summary.dump() << '\n';
  return os.str();
}

}  // namespace xmts::eval
