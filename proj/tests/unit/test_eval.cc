// xmts/tests/unit/test_eval.cc

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

#include <cmath>
#include <random>
#include <sstream>

#include "common/test_util.h"
#include "doctest.h"
#include "json.hpp"
#include "xmts/asr/decode.h"
#include "xmts/diff/errors.h"
#include "xmts/diff/fdcheck.h"
#include "xmts/eval/protocol.h"

using namespace xmts;
using namespace xmts::eval;

namespace {

std::vector<Embedding> gaussian_set(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<Embedding> out(n, Embedding(d));
  for (auto& e : out)
    for (auto& v : e) v = nd(rng);
  return out;
}

Classifier random_classifier(std::mt19937_64& rng, std::size_t d, int c) {
  Classifier clf = Classifier::zeros(d, c);
  clf.params.mutable_value("clf.weight") = xmts::testing::random_tensor(rng, d, c);
  return clf;
}

struct Rig {
  Rig() {
    asr::AsrConfig ac;
    ac.encoder = {8, 2, 16, 2};
    ac.decoder_layers = 1;
    asr = asr::AsrModel::create(ac, 1);
    nlu::NluConfig nc;
    nc.encoder = {12, 3, 24, 2};
    teacher = nlu::NluModel::create(nc, 2);
    student = slu::assemble_student(asr, teacher, 3);
    auto spec = synth::AcousticSpec::make(8, 4, 6, 0.05, 7);
    train = synth::generate_classification_split(4, 16, spec, 11, synth::Split::kTrain);
    test = synth::generate_classification_split(4, 8, spec, 13, synth::Split::kTest);
    clf = train_classifier(teacher_embeddings(teacher, train), corpus_labels(train), {50, 1e-2, 1});
  }
  asr::AsrModel asr;
  nlu::NluModel teacher;
  slu::StudentModel student;
  synth::Corpus train, test;
  Classifier clf;
};

UtteranceResult rec(const std::string& id, int label, int predicted, double wer) {
  UtteranceResult r;
  r.id = id;
  r.label = label;
  r.predicted = predicted;
  r.wer = wer;
  return r;
}

}  // namespace

TEST_CASE("classifier: zero init has loss ln C, steps 0 returns it") {
  std::mt19937_64 rng(1);
  for (int c : {2, 3, 4, 7}) {
    auto embs = gaussian_set(rng, 20, 5);
    std::vector<int> labels(20);
    for (int i = 0; i < 20; ++i) labels[i] = i % c;
    CHECK(classifier_loss_value(Classifier::zeros(5, c), embs, labels) ==
          doctest::Approx(std::log(static_cast<double>(c))).epsilon(1e-14));
    auto clf = train_classifier(embs, labels, {0, 1e-2, 1});
    CHECK(clf.params == Classifier::zeros(5, c).params);
  }
  CHECK_THROWS_AS(train_classifier({{1.0}, {2.0}}, {1, 1}, {}), ContractViolation);
  CHECK_THROWS_AS(stack_embeddings({{1.0, 2.0}, {1.0}}), ContractViolation);
  CHECK_THROWS_AS(Classifier::zeros(3, 1), ContractViolation);
}

TEST_CASE("classifier: separable data is fit exactly, training is deterministic") {
  std::mt19937_64 rng(2);
  auto embs = gaussian_set(rng, 60, 6);
  std::vector<int> labels(60);
  for (std::size_t i = 0; i < 60; ++i) {
    labels[i] = static_cast<int>(i % 2);
    embs[i][2] += labels[i] ? 2.0 : -2.0;
  }
  auto clf = train_classifier(embs, labels, {500, 1e-2, 1});
  CHECK(evaluate(clf, embs, labels).accuracy == 1.0);
  CHECK(classifier_loss_value(clf, embs, labels) < 0.1);
  CHECK(train_classifier(embs, labels, {500, 1e-2, 1}).params == clf.params);
}

TEST_CASE("classifier: cross-entropy finite differences, 100 cases") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = xmts::testing::uniform_size(rng, 1, 6);
    const int c = static_cast<int>(xmts::testing::uniform_size(rng, 2, 5));
    const std::size_t n = xmts::testing::uniform_size(rng, 1, 5);
    Classifier clf = random_classifier(rng, d, c);
    for (double& b : clf.params.mutable_value("clf.bias").storage()) b = std::normal_distribution<double>()(rng);
    Tensor x = xmts::testing::random_tensor(rng, n, d);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(xmts::testing::uniform_size(rng, 0, c - 1));
    worst = std::max(worst, diff::finite_difference_check(
                                [&](diff::Graph& g) { return classifier_loss(g, g.constant(x), labels); },
                                clf.params, 1e-6));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("evaluate: constant predictor, perfect predictor, recount oracle") {
  std::mt19937_64 rng(4);
  for (int c : {2, 4, 5}) {
    auto embs = gaussian_set(rng, 10 * c, 3);
    std::vector<int> labels(embs.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i) % c;
    Classifier zero = Classifier::zeros(3, c);  // all ties -> class 0
    CHECK(evaluate(zero, embs, labels).accuracy == doctest::Approx(1.0 / c).epsilon(1e-15));
  }
  for (int trial = 0; trial < 50; ++trial) {
    auto embs = gaussian_set(rng, 30, 4);
    Classifier clf = random_classifier(rng, 4, 3);
    std::vector<int> labels(30);
    for (auto& l : labels) l = static_cast<int>(xmts::testing::uniform_size(rng, 0, 2));
    auto r = evaluate(clf, embs, labels);
    CHECK(evaluate(clf, embs, predict(clf, embs)).accuracy == 1.0);
    // Independent recount: argmax by explicit dot products.
    const auto& w = clf.params.value("clf.weight");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < embs.size(); ++i) {
      int best = 0;
      double best_v = -1e300;
      for (int c = 0; c < 3; ++c) {
        double v = 0.0;
        for (std::size_t k = 0; k < 4; ++k) v += embs[i][k] * w(k, static_cast<std::size_t>(c));
        if (v > best_v) best_v = v, best = c;
      }
      hits += best == labels[i];
    }
    CHECK(r.correct == hits);
    CHECK(r.accuracy == static_cast<double>(hits) / 30.0);
  }
  CHECK_THROWS_AS(evaluate(Classifier::zeros(3, 2), {}, {}), ContractViolation);
  CHECK_THROWS_AS(evaluate(Classifier::zeros(3, 2), {{1, 2}}, {0}), ContractViolation);
}

TEST_CASE("select_classifier: earlier grid entries win ties") {
  std::mt19937_64 rng(5);
  auto embs = gaussian_set(rng, 40, 4);
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    labels[i] = static_cast<int>(i % 2);
    embs[i][0] += labels[i] ? 5.0 : -5.0;
  }
  auto g = select_classifier(embs, labels, embs, labels, {1e-3, 1e-2}, {500, 2000}, 1);
  REQUIRE(g.tried.size() == 4);
  CHECK(g.valid_accuracy == 1.0);
  CHECK(g.tried[0].first.lr == 1e-3);
  CHECK(g.tried[0].first.steps == 500);
  CHECK(g.classifier.config.lr == 1e-3);
  CHECK(g.classifier.config.steps == 500);
}

TEST_CASE("pipeline_baseline: per-utterance WER matches an independent recompute") {
  Rig r;
  auto res = pipeline_baseline(r.asr, r.teacher, r.clf, r.test);
  REQUIRE(res.records.size() == r.test.size());
  for (std::size_t i = 0; i < r.test.size(); ++i) {
    const auto& u = r.test.utterances[i];
    auto hyp = asr::greedy_decode(r.asr.config, r.asr.params, u.frames).tokens;
    REQUIRE(res.records[i].wer.has_value());
    CHECK(*res.records[i].wer == asr::word_error_rate(u.tokens, hyp));
    CHECK(res.records[i].id == u.id);
    CHECK(res.records[i].empty_hypothesis == hyp.empty());
  }
}

TEST_CASE("pipeline_baseline: empty hypotheses are flagged and collapse to one class") {
  Rig r;
  asr::AsrModel mute = r.asr;
  mute.params.mutable_value("asr.decoder.out.bias").storage()[synth::Vocab::kEos] = 1e3;
  auto res = pipeline_baseline(mute, r.teacher, r.clf, r.test);
  std::size_t majority = 0;
  std::vector<std::size_t> per(4, 0);
  for (const auto& u : r.test.utterances) majority = std::max(majority, ++per[*u.label]);
  for (const auto& rec : res.records) {
    CHECK(rec.empty_hypothesis);
    CHECK(*rec.wer == 1.0);
    CHECK(rec.predicted == res.records[0].predicted);
  }
  CHECK(res.accuracy <= static_cast<double>(majority) / r.test.size());
}

TEST_CASE("fewshot: sampling, identity at n=0, freeze contracts") {
  Rig r;
  auto s = fewshot_sample(r.train, 4, 2, 7);
  CHECK(s.size() == 8);
  CHECK(s == fewshot_sample(r.train, 4, 2, 7));
  std::vector<int> per(4, 0);
  for (auto i : s) ++per[*r.train.utterances[i].label];
  for (int c : per) CHECK(c == 2);
  CHECK_THROWS_AS(fewshot_sample(r.train, 4, 5, 7), ContractViolation);
  CHECK_THROWS_AS(parse_fewshot_mode("all"), ContractViolation);
  CHECK(parse_fewshot_mode("output_only") == FewshotMode::kOutputOnly);

  FewshotConfig cfg{5, 1e-2, 2, 1};
  auto id = fewshot_finetune(r.student, r.clf, r.train, 0, FewshotMode::kOutputPlusEncoderLayers, cfg);
  CHECK(id.student.params == r.student.params);
  CHECK(id.classifier.params == r.clf.params);
  CHECK(zero_shot(id.student, id.classifier, r.test).accuracy ==
        zero_shot(r.student, r.clf, r.test).accuracy);

  auto out = fewshot_finetune(r.student, r.clf, r.train, 2, FewshotMode::kOutputOnly, cfg);
  CHECK(out.student.params.checksum() == r.student.params.checksum());
  CHECK_FALSE(out.classifier.params == r.clf.params);
  CHECK(out.step_loss.size() == 5);

  auto enc = fewshot_finetune(r.student, r.clf, r.train, 2, FewshotMode::kOutputPlusEncoderLayers, cfg);
  for (const auto& name : r.student.params.names()) {
    const bool top = diff::name_under(name, slu::student_encoder_layer(0)) ||
                     diff::name_under(name, slu::student_encoder_layer(1));
    if (!top) CHECK(enc.student.params.value(name) == r.student.params.value(name));
  }
  CHECK_FALSE(enc.student.params == r.student.params);
  CHECK(enc.student.params.checksum() ==
        fewshot_finetune(r.student, r.clf, r.train, 2, FewshotMode::kOutputPlusEncoderLayers, cfg)
            .student.params.checksum());
}

TEST_CASE("wer buckets: boundaries, partition, CSV") {
  CHECK(bucket_index(0.0, 10) == 0);
  CHECK(bucket_index(0.0999, 10) == 0);
  CHECK(bucket_index(0.10, 10) == 1);
  CHECK(bucket_index(0.30, 10) == 3);
  CHECK(bucket_index(1.0, 10) == 10);
  CHECK(bucket_index(0.5, 25) == 2);

  EvalResult p, e;
  for (int i = 0; i < 5; ++i) {
    p.records.push_back(rec("u" + std::to_string(i), 0, 0, 0.0));
    e.records.push_back(rec("u" + std::to_string(i), 0, 1, 0.0));
  }
  auto all0 = wer_bucket_report(p, e);
  CHECK(all0.buckets[0].count == 5);
  CHECK(all0.buckets[0].pipeline_acc() == 1.0);
  CHECK(all0.buckets[0].e2e_acc() == 0.0);
  for (std::size_t b = 1; b < all0.buckets.size(); ++b) CHECK(all0.buckets[b].count == 0);

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(0.0, 1.6);
  EvalResult rp, re;
  for (int i = 0; i < 500; ++i) {
    const double v = i % 7 == 0 ? 0.1 * (i % 13) : w(rng);
    rp.records.push_back(rec("x" + std::to_string(i), i % 3, (i * 7) % 3, v));
    re.records.push_back(rec("x" + std::to_string(i), i % 3, (i * 5) % 3, v));
  }
  std::reverse(re.records.begin(), re.records.end());
  auto rep = wer_bucket_report(rp, re);
  std::size_t sum = 0, over = 0;
  for (const auto& b : rep.buckets) sum += b.count;
  for (const auto& r : rp.records) over += *r.wer > 1.0;
  CHECK(sum + rep.excluded == rep.total);
  CHECK(rep.total == 500);
  CHECK(rep.excluded == over);

  auto csv = bucket_csv(all0);
  CHECK(csv.rfind("bucket_lo,bucket_hi,count,pipeline_acc,e2e_acc\n0,10,5,", 0) == 0);
  CHECK(csv.find("excluded,,0,,\n") != std::string::npos);

  EvalResult bad = e;
  bad.records[2].id = "zz";
  CHECK_THROWS_AS(wer_bucket_report(p, bad), ContractViolation);
}

TEST_CASE("eval_jsonl: one record per utterance plus a summary") {
  EvalResult r;
  r.records = {rec("a", 1, 1, 0.0), rec("b", 0, 1, 0.5)};
  r.correct = 1;
  r.accuracy = 0.5;
  std::istringstream in(eval_jsonl(r, "t"));
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1]["id"] == "b");
  CHECK(rows[1]["wer"] == 0.5);
  CHECK(rows[2]["summary"] == true);
  CHECK(rows[2]["accuracy"] == 0.5);
  CHECK(rows[2]["total"] == 2);
}
