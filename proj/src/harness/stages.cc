// xmts/src/harness/stages.cc

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
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "json.hpp"
#include "xmts/asr/decode.h"
#include "xmts/diff/checkpoint.h"
#include "xmts/diff/errors.h"
#include "xmts/harness/run.h"

namespace xmts::harness {

using nlohmann::json;

namespace {

// --- Helpers ---------------------------------------------------------------

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_jsonl(const std::string& path, const std::vector<json>& rows) {
  std::ostringstream os;
  for (const auto& r : rows) os << r.dump() << '\n';
  eval::write_text(path, os.str());
}

void write_json(const std::string& path, const json& j) { eval::write_text(path, j.dump(2) + "\n"); }

void save_params(const std::string& path, const diff::ParamSet& params) {
  diff::ModelCheckpoint ck;
  ck.params = params;
  diff::save_checkpoint(path, ck);
}

// Loads a checkpoint and checks it carries exactly the parameters of the
// configured model with matching shapes.
diff::ParamSet load_params(const StageContext& ctx, const std::string& rel,
                           const diff::ParamSet& expected) {
  diff::ModelCheckpoint ck = diff::load_checkpoint(ctx.path(rel));
  auto mismatch = [&](const std::string& why) {
    return LoadError(LoadError::Kind::kMalformed,
                     rel + " does not match the configured model (" + why +
                         "); rerun the stage that produced it");
  };
  for (const auto& [name, p] : expected) {
    if (!ck.params.contains(name)) throw mismatch("missing " + name);
    if (ck.params.value(name).shape() != p.value.shape()) throw mismatch("shape of " + name);
  }
  if (ck.params.size() != expected.size()) throw mismatch("unexpected extra parameters");
  return ck.params;
}

asr::AsrModel load_asr(const StageContext& ctx) {
  asr::AsrModel m = asr::AsrModel::create(asr_model_config(ctx.cfg), 0);
  m.params = load_params(ctx, "asr/model.ckpt", m.params);
  return m;
}

nlu::NluModel load_nlu(const StageContext& ctx, const std::string& rel) {
  nlu::NluModel m = nlu::NluModel::create(nlu_model_config(ctx.cfg), 0);
  m.params = load_params(ctx, rel, m.params);
  return m;
}

slu::StudentModel load_student(const StageContext& ctx, const std::string& rel) {
  slu::StudentModel s = slu::assemble_student(asr::AsrModel::create(asr_model_config(ctx.cfg), 0),
                                              nlu::NluModel::create(nlu_model_config(ctx.cfg), 0), 0);
  s.params = load_params(ctx, rel, s.params);
  return s;
}

eval::Classifier load_classifier(const StageContext& ctx) {
  eval::Classifier c = eval::Classifier::zeros(ctx.cfg.nlu.dim, ctx.cfg.data.classes);
  c.params = load_params(ctx, "eval/classifier.ckpt", c.params);
  return c;
}

synth::Corpus corpus(const StageContext& ctx, const std::string& rel) {
  return synth::read_corpus(ctx.path(rel));
}

std::vector<synth::TokenSequence> read_texts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Kind::kIo, "cannot read " + path);
  std::vector<synth::TokenSequence> texts;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    synth::TokenSequence t;
    std::string sym;
    while (ls >> sym) {
      const int id = synth::Vocab::id_of(sym);
      if (!synth::Vocab::is_content(id))
        throw LoadError(LoadError::Kind::kMalformed, path + ": unexpected symbol '" + sym + "'");
      t.push_back(id);
    }
    if (!t.empty()) texts.push_back(std::move(t));
  }
  return texts;
}

// Total edits over total reference words.
double corpus_wer(const eval::EvalResult& r, const synth::Corpus& c) {
  double edits = 0.0, words = 0.0;
  for (std::size_t i = 0; i < r.records.size(); ++i) {
    const double n = static_cast<double>(c.utterances[i].tokens.size());
    edits += std::round(r.records[i].wer.value_or(0.0) * n);
    words += n;
  }
  return words > 0 ? edits / words : 0.0;
}

eval::EvalResult read_eval_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Kind::kIo, "cannot read " + path);
  eval::EvalResult r;
  std::string line;
  try {
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json j = json::parse(line);
      if (j.value("summary", false)) continue;
      eval::UtteranceResult u;
      u.id = j.at("id").get<std::string>();
      u.label = j.at("label").get<int>();
      u.predicted = j.at("predicted").get<int>();
      if (j.contains("wer")) u.wer = j.at("wer").get<double>();
      u.empty_hypothesis = j.value("empty_hypothesis", false);
      if (u.label == u.predicted) ++r.correct;
      r.records.push_back(std::move(u));
    }
  } catch (const json::exception& e) {
    throw LoadError(LoadError::Kind::kMalformed, path + ": " + e.what());
  }
  r.accuracy = r.records.empty() ? 0.0 : static_cast<double>(r.correct) / r.records.size();
  return r;
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(LoadError::Kind::kIo, "cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(LoadError::Kind::kMalformed, path + ": " + e.what());
  }
}

// --- Stages ----------------------------------------------------------------

void gen_data(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& d = cfg.data;
  const auto spec = acoustic_spec(cfg, d.noise_sigma);
  const auto noisy = acoustic_spec(cfg, d.noisy_sigma);
  auto split = [&](std::size_t n, const char* tag, synth::Split s) {
    return synth::generate_classification_split(d.classes, n, spec, stream_seed(cfg, tag), s,
                                                d.rich_transcripts);
  };
  const auto train = split(d.train_size, "data.train", synth::Split::kTrain);
  const auto valid = split(d.valid_size, "data.valid", synth::Split::kValid);
  const auto test = split(d.test_size, "data.test", synth::Split::kTest);
  const auto train_noisy = synth::rerender(train, noisy, stream_seed(cfg, "data.noisy.train"));
  const auto test_noisy = synth::rerender(test, noisy, stream_seed(cfg, "data.noisy.test"));

  const auto asr_train = synth::concat(
      synth::generate_classification_split(synth::kMaxClasses, d.asr_template_sentences, spec,
                                           stream_seed(cfg, "data.asr.templates"),
                                           synth::Split::kTrain),
      synth::render_texts(synth::generate_bigram_texts(d.asr_bigram_texts,
                                                       stream_seed(cfg, "data.asr.bigram")),
                          spec, stream_seed(cfg, "data.asr.render"), synth::Split::kTrain,
                          "asr-bigram"));
  const auto asr_valid =
      synth::generate_classification_split(synth::kMaxClasses, d.asr_valid_size, spec,
                                           stream_seed(cfg, "data.asr.valid"), synth::Split::kValid);

  auto texts = synth::generate_bigram_texts(d.nlu_bigram_texts, stream_seed(cfg, "data.nlu.bigram"));
  const auto tseed = stream_seed(cfg, "data.nlu.templates");
  for (std::size_t i = 0; i < d.nlu_template_sentences; ++i) {
    Rng rng(derive_seed(tseed, i));
    texts.push_back(synth::sample_class_sentence(static_cast<int>(i % synth::kMaxClasses), rng));
  }
  std::ostringstream os;
  for (const auto& t : texts) os << synth::Vocab::join(t) << '\n';

  synth::write_corpus(train, ctx.path("data/train.xmco"));
  synth::write_corpus(valid, ctx.path("data/valid.xmco"));
  synth::write_corpus(test, ctx.path("data/test.xmco"));
  synth::write_corpus(train_noisy, ctx.path("data/train_noisy.xmco"));
  synth::write_corpus(test_noisy, ctx.path("data/test_noisy.xmco"));
  synth::write_corpus(asr_train, ctx.path("data/asr_train.xmco"));
  synth::write_corpus(asr_valid, ctx.path("data/asr_valid.xmco"));
  eval::write_text(ctx.path("data/nlu_texts.txt"), os.str());
  synth::write_manifest(train, ctx.path("data/train.tsv"));
  synth::write_manifest(valid, ctx.path("data/valid.tsv"));
  synth::write_manifest(test, ctx.path("data/test.tsv"));
  spdlog::info("gen-data: {} train, {} valid, {} test, {} ASR, {} NLU texts", train.size(),
               valid.size(), test.size(), asr_train.size(), texts.size());
}

void pretrain_asr(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto train = corpus(ctx, "data/asr_train.xmco");
  const auto valid = corpus(ctx, "data/asr_valid.xmco");
  const auto init = asr::AsrModel::create(asr_model_config(cfg), stream_seed(cfg, "asr.init"));
  const auto res = asr::train_asr(init, train, valid, asr_train_config(cfg));
  if (res.aborted) spdlog::warn("pretrain-asr: training stopped early: {}", res.abort_reason);

  diff::ModelCheckpoint ck;
  ck.params = res.model.params;
  ck.valid_loss = res.model_valid_loss;
  ck.source_count = res.averaged_from;
  diff::save_checkpoint(ctx.path("asr/model.ckpt"), ck);

  std::vector<json> rows;
  for (const auto& m : res.metrics)
    rows.push_back({{"epoch", m.epoch},
                    {"train_loss", number_or_null(m.train_loss)},
                    {"valid_loss", number_or_null(m.valid_loss)},
                    {"lr", m.lr}});
  write_jsonl(ctx.path("asr/metrics.jsonl"), rows);

  // WER of the persisted model on the held-out ASR set.
  const auto model = load_asr(ctx);
  double edits = 0.0, words = 0.0;
  for (const auto& u : valid.utterances) {
    edits += static_cast<double>(
        asr::edit_distance(u.tokens, asr::greedy_decode(model.config, model.params, u.frames).tokens));
    words += static_cast<double>(u.tokens.size());
  }
  const double wer = edits / words;
  write_json(ctx.path("asr/summary.json"), {{"valid_loss", number_or_null(res.model_valid_loss)},
                                            {"averaged_from", res.averaged_from},
                                            {"aborted", res.aborted},
                                            {"valid_wer", wer}});
  spdlog::info("pretrain-asr: averaged {} checkpoints, valid loss {:.4f}, valid WER {:.4f}",
               res.averaged_from, res.model_valid_loss, wer);
}

void pretrain_nlu(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto texts = read_texts(ctx.path("data/nlu_texts.txt"));
  const auto init = nlu::NluModel::create(nlu_model_config(cfg), stream_seed(cfg, "nlu.init"));
  const auto res = nlu::mlm_pretrain(init, texts, mlm_config(cfg));
  save_params(ctx.path("nlu/mlm.ckpt"), res.model.params);

  std::vector<json> rows;
  for (std::size_t i = 0; i < res.step_loss.size(); ++i)
    rows.push_back({{"step", i + 1}, {"loss", number_or_null(res.step_loss[i])}});
  write_jsonl(ctx.path("nlu/mlm_metrics.jsonl"), rows);

  const auto model = load_nlu(ctx, "nlu/mlm.ckpt");
  const double acc =
      nlu::masked_token_accuracy(model, texts, cfg.nlu.mask_prob, stream_seed(cfg, "nlu.mlm.eval"));
  write_json(ctx.path("nlu/mlm_summary.json"),
             {{"final_loss", res.step_loss.empty() ? json(nullptr) : number_or_null(res.step_loss.back())},
              {"masked_token_accuracy", acc},
              {"resampled_batches", res.resampled_batches}});
  spdlog::info("pretrain-nlu: masked-token accuracy {:.3f}", acc);
}

void finetune_nlu(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto& n = cfg.nlu;
  nlu::NluModel model = load_nlu(ctx, "nlu/mlm.ckpt");
  std::vector<json> rows;
  json summary = json::object();
  auto log_steps = [&](const char* phase, const nlu::PairTrainResult& r) {
    for (std::size_t i = 0; i < r.step_loss.size(); ++i)
      rows.push_back({{"phase", phase}, {"step", i + 1}, {"loss", number_or_null(r.step_loss[i])}});
  };
  if (n.nli_steps > 0) {
    const auto pairs = nlu::generate_nli_pairs(n.nli_pairs, stream_seed(cfg, "nlu.nli.pairs"));
    const auto res =
        nlu::finetune_pairs_classify(model, pairs, pair_config(cfg, n.nli_steps, "nlu.nli"));
    const auto heldout =
        nlu::generate_nli_pairs(n.heldout_pairs, stream_seed(cfg, "nlu.nli.heldout"));
    const double acc = nlu::pair_accuracy(res.model, res.head, heldout);
    log_steps("nli", res);
    summary["nli"] = {{"initial_loss", number_or_null(res.initial_loss)},
                      {"final_loss", number_or_null(res.step_loss.back())},
                      {"heldout_accuracy", acc},
                      {"degenerate", res.degenerate}};
    spdlog::info("finetune-nlu: NLI held-out accuracy {:.3f}", acc);
    model = res.model;
  }
  if (n.sts_steps > 0) {
    const auto pairs = nlu::generate_sts_pairs(n.sts_pairs, stream_seed(cfg, "nlu.sts.pairs"));
    const auto res =
        nlu::finetune_pairs_similarity(model, pairs, pair_config(cfg, n.sts_steps, "nlu.sts"));
    log_steps("sts", res);
    summary["sts"] = {{"initial_loss", number_or_null(res.initial_loss)},
                      {"final_loss", number_or_null(res.step_loss.back())},
                      {"floored_norms", res.floored_norms}};
    spdlog::info("finetune-nlu: STS loss {:.4f} -> {:.4f}", res.initial_loss, res.step_loss.back());
    model = res.model;
  }
  save_params(ctx.path("nlu/teacher.ckpt"), model.params);
  write_jsonl(ctx.path("nlu/finetune_metrics.jsonl"), rows);
  write_json(ctx.path("nlu/finetune_summary.json"), summary);
}

std::vector<json> distill_rows(const std::vector<slu::DistillEpoch>& metrics,
                               const slu::DistillConfig& dc) {
  std::vector<json> rows;
  for (const auto& m : metrics)
    rows.push_back({{"epoch", m.epoch},
                    {"train_distance", m.epoch == 0 ? json(nullptr) : number_or_null(m.train_distance)},
                    {"valid_distance", number_or_null(m.valid_distance)},
                    {"objective", slu::distance_name(dc.objective)},
                    {"k", dc.asr_layers_to_tune},
                    {"m", dc.nlu_layers_to_tune},
                    {"lr", m.lr}});
  return rows;
}

slu::StudentModel fresh_student(const StageContext& ctx) {
  return slu::assemble_student(load_asr(ctx), load_nlu(ctx, "nlu/teacher.ckpt"),
                               stream_seed(ctx.cfg, "slu.bridge"));
}

void distill(const StageContext& ctx) {
  const auto teacher = load_nlu(ctx, "nlu/teacher.ckpt");
  const auto student = fresh_student(ctx);
  const auto train = corpus(ctx, "data/train.xmco");
  const auto valid = corpus(ctx, "data/valid.xmco");
  const auto dc = distill_config(ctx.cfg);
  save_params(ctx.path("slu/student_init.ckpt"), student.params);
  const auto res = slu::distill(student, teacher, train, valid, dc);
  if (res.aborted) spdlog::warn("distill: stopped early: {}", res.abort_reason);
  save_params(ctx.path("slu/student.ckpt"), res.student.params);
  write_jsonl(ctx.path("slu/distill_metrics.jsonl"), distill_rows(res.metrics, dc));
  const double first = res.metrics.front().valid_distance;
  const double last = res.metrics.back().valid_distance;
  write_json(ctx.path("slu/distill_summary.json"),
             {{"objective", slu::distance_name(dc.objective)},
              {"initial_valid_distance", number_or_null(first)},
              {"final_valid_distance", number_or_null(last)},
              {"ratio", number_or_null(last / first)},
              {"trainable_scalars", res.trainable_scalars},
              {"steps", res.steps},
              {"aborted", res.aborted}});
  spdlog::info("distill: valid distance {:.4f} -> {:.4f}", first, last);
}

void ablate_layers(const StageContext& ctx) {
  const auto teacher = load_nlu(ctx, "nlu/teacher.ckpt");
  const auto student = fresh_student(ctx);
  const auto train = corpus(ctx, "data/train.xmco");
  const auto valid = corpus(ctx, "data/valid.xmco");
  const auto base = distill_config(ctx.cfg);
  const auto rows = slu::layer_ablation(student, teacher, train, valid, ctx.cfg.slu.ablation_k,
                                        ctx.cfg.slu.ablation_m, base);
  std::ostringstream csv;
  csv << "k,m,valid_distance,trainable_scalars\n";
  std::vector<json> metrics;
  for (const auto& r : rows) {
    json v = number_or_null(r.valid_distance);
    csv << r.k << ',' << r.m << ',' << v.dump() << ',' << r.trainable_scalars << '\n';
    auto dc = base;
    dc.asr_layers_to_tune = r.k;
    dc.nlu_layers_to_tune = r.m;
    for (auto& row : distill_rows(r.metrics, dc)) metrics.push_back(std::move(row));
    spdlog::info("ablate-layers: k={} m={} valid distance {:.4f}", r.k, r.m, r.valid_distance);
  }
  eval::write_text(ctx.path("slu/ablation.csv"), csv.str());
  write_jsonl(ctx.path("slu/ablation_metrics.jsonl"), metrics);
}

void eval_zero_shot(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto asr_model = load_asr(ctx);
  const auto teacher = load_nlu(ctx, "nlu/teacher.ckpt");
  const auto student = load_student(ctx, "slu/student.ckpt");
  const auto undistilled = load_student(ctx, "slu/student_init.ckpt");
  const auto train = corpus(ctx, "data/train.xmco");
  const auto valid = corpus(ctx, "data/valid.xmco");
  const auto test = corpus(ctx, "data/test.xmco");
  const auto test_noisy = corpus(ctx, "data/test_noisy.xmco");

  const auto grid = eval::select_classifier(
      eval::teacher_embeddings(teacher, train), eval::corpus_labels(train),
      eval::teacher_embeddings(teacher, valid), eval::corpus_labels(valid),
      cfg.eval.classifier_lrs, cfg.eval.classifier_steps, stream_seed(cfg, "eval.classifier"));
  save_params(ctx.path("eval/classifier.ckpt"), grid.classifier.params);
  const auto clf = load_classifier(ctx);
  std::vector<json> grid_rows;
  for (const auto& [c, acc] : grid.tried)
    grid_rows.push_back({{"lr", c.lr},
                         {"steps", c.steps},
                         {"valid_accuracy", acc},
                         {"chosen", c.lr == grid.classifier.config.lr &&
                                        c.steps == grid.classifier.config.steps}});
  write_jsonl(ctx.path("eval/classifier_grid.jsonl"), grid_rows);

  const auto teacher_res = eval::evaluate(clf, eval::teacher_embeddings(teacher, test),
                                          eval::corpus_labels(test), eval::corpus_ids(test));
  const auto zs = eval::zero_shot(student, clf, test);
  const auto undist = eval::zero_shot(undistilled, clf, test);
  const auto pipe = eval::pipeline_baseline(asr_model, teacher, clf, test);
  const auto zs_noisy = eval::zero_shot(student, clf, test_noisy);
  const auto pipe_noisy = eval::pipeline_baseline(asr_model, teacher, clf, test_noisy);

  eval::write_text(ctx.path("eval/teacher.jsonl"), eval::eval_jsonl(teacher_res, "teacher"));
  eval::write_text(ctx.path("eval/zero_shot.jsonl"), eval::eval_jsonl(zs, "zero_shot"));
  eval::write_text(ctx.path("eval/undistilled.jsonl"), eval::eval_jsonl(undist, "undistilled"));
  eval::write_text(ctx.path("eval/pipeline.jsonl"), eval::eval_jsonl(pipe, "pipeline"));
  eval::write_text(ctx.path("eval/zero_shot_noisy.jsonl"),
                   eval::eval_jsonl(zs_noisy, "zero_shot_noisy"));
  eval::write_text(ctx.path("eval/pipeline_noisy.jsonl"),
                   eval::eval_jsonl(pipe_noisy, "pipeline_noisy"));

  const double chance = 1.0 / cfg.data.classes;
  write_json(ctx.path("eval/summary.json"),
             {{"classes", cfg.data.classes},
              {"chance", chance},
              {"classifier_valid_accuracy", grid.valid_accuracy},
              {"teacher_accuracy", teacher_res.accuracy},
              {"zero_shot_accuracy", zs.accuracy},
              {"undistilled_accuracy", undist.accuracy},
              {"pipeline_accuracy", pipe.accuracy},
              {"pipeline_wer", corpus_wer(pipe, test)},
              {"zero_shot_noisy_accuracy", zs_noisy.accuracy},
              {"pipeline_noisy_accuracy", pipe_noisy.accuracy},
              {"pipeline_noisy_wer", corpus_wer(pipe_noisy, test_noisy)}});
  spdlog::info("eval-zero-shot: teacher {:.3f}, zero-shot {:.3f}, undistilled {:.3f}, pipeline {:.3f}",
               teacher_res.accuracy, zs.accuracy, undist.accuracy, pipe.accuracy);
  spdlog::info("eval-zero-shot: noisy zero-shot {:.3f}, noisy pipeline {:.3f} (WER {:.3f})",
               zs_noisy.accuracy, pipe_noisy.accuracy, corpus_wer(pipe_noisy, test_noisy));
}

void fewshot(const StageContext& ctx) {
  const auto& cfg = ctx.cfg;
  const auto student = load_student(ctx, "slu/student.ckpt");
  const auto clf = load_classifier(ctx);
  const auto train = corpus(ctx, "data/train_noisy.xmco");
  const auto test = corpus(ctx, "data/test_noisy.xmco");
  const auto fc = fewshot_config(cfg);
  std::vector<json> rows;
  for (std::size_t n : cfg.eval.fewshot_n) {
    for (auto mode : {eval::FewshotMode::kOutputOnly, eval::FewshotMode::kOutputPlusEncoderLayers}) {
      const auto res = eval::fewshot_finetune(student, clf, train, n, mode, fc);
      const auto r = eval::zero_shot(res.student, res.classifier, test);
      rows.push_back({{"n", n},
                      {"mode", eval::fewshot_mode_name(mode)},
                      {"accuracy", r.accuracy},
                      {"correct", r.correct},
                      {"total", r.records.size()},
                      {"final_loss", res.step_loss.empty() ? json(nullptr)
                                                           : number_or_null(res.step_loss.back())}});
      spdlog::info("fewshot: n={} {} accuracy {:.3f}", n, eval::fewshot_mode_name(mode), r.accuracy);
    }
  }
  write_jsonl(ctx.path("eval/fewshot.jsonl"), rows);
}

void report(const StageContext& ctx) {
  const double w = ctx.cfg.eval.bucket_width;
  const auto clean = eval::wer_bucket_report(read_eval_jsonl(ctx.path("eval/pipeline.jsonl")),
                                             read_eval_jsonl(ctx.path("eval/zero_shot.jsonl")), w);
  const auto noisy =
      eval::wer_bucket_report(read_eval_jsonl(ctx.path("eval/pipeline_noisy.jsonl")),
                              read_eval_jsonl(ctx.path("eval/zero_shot_noisy.jsonl")), w);
  eval::write_text(ctx.path("eval/buckets.csv"), eval::bucket_csv(noisy));
  eval::write_text(ctx.path("eval/buckets_clean.csv"), eval::bucket_csv(clean));

  json fewshot = json::array();
  {
    std::ifstream in(ctx.path("eval/fewshot.jsonl"));
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) fewshot.push_back(json::parse(line));
  }
  json buckets = json::array();
  for (const auto& b : noisy.buckets)
    buckets.push_back({{"lo", b.lo},
                       {"hi", b.hi},
                       {"count", b.count},
                       {"pipeline_accuracy", number_or_null(b.pipeline_acc())},
                       {"e2e_accuracy", number_or_null(b.e2e_acc())}});
  write_json(ctx.path("eval/report.json"),
             {{"evaluation", read_json(ctx.path("eval/summary.json"))},
              {"distillation", read_json(ctx.path("slu/distill_summary.json"))},
              {"fewshot", fewshot},
              {"noisy_buckets", buckets},
              {"noisy_excluded", noisy.excluded},
              {"noisy_total", noisy.total}});
  spdlog::info("report: {} noisy test utterances in {} buckets, {} above 100% WER", noisy.total,
               noisy.buckets.size(), noisy.excluded);
}

}  // namespace

const std::vector<StageDef>& stages() {
  static const std::vector<StageDef> defs = {
      {"gen-data",
       {},
       {"data/train.xmco", "data/valid.xmco", "data/test.xmco", "data/train_noisy.xmco",
        "data/test_noisy.xmco", "data/asr_train.xmco", "data/asr_valid.xmco",
        "data/nlu_texts.txt", "data/train.tsv", "data/valid.tsv", "data/test.tsv"},
       gen_data},
      {"pretrain-asr",
       {"data/asr_train.xmco", "data/asr_valid.xmco"},
       {"asr/model.ckpt", "asr/metrics.jsonl", "asr/summary.json"},
       pretrain_asr},
      {"pretrain-nlu",
       {"data/nlu_texts.txt"},
       {"nlu/mlm.ckpt", "nlu/mlm_metrics.jsonl", "nlu/mlm_summary.json"},
       pretrain_nlu},
      {"finetune-nlu",
       {"nlu/mlm.ckpt"},
       {"nlu/teacher.ckpt", "nlu/finetune_metrics.jsonl", "nlu/finetune_summary.json"},
       finetune_nlu},
      {"distill",
       {"asr/model.ckpt", "nlu/teacher.ckpt", "data/train.xmco", "data/valid.xmco"},
       {"slu/student_init.ckpt", "slu/student.ckpt", "slu/distill_metrics.jsonl",
        "slu/distill_summary.json"},
       distill},
      {"ablate-layers",
       {"asr/model.ckpt", "nlu/teacher.ckpt", "data/train.xmco", "data/valid.xmco"},
       {"slu/ablation.csv", "slu/ablation_metrics.jsonl"},
       ablate_layers},
      {"eval-zero-shot",
       {"asr/model.ckpt", "nlu/teacher.ckpt", "slu/student.ckpt", "slu/student_init.ckpt",
        "data/train.xmco", "data/valid.xmco", "data/test.xmco", "data/test_noisy.xmco"},
       {"eval/classifier.ckpt", "eval/classifier_grid.jsonl", "eval/teacher.jsonl",
        "eval/zero_shot.jsonl", "eval/undistilled.jsonl", "eval/pipeline.jsonl",
        "eval/zero_shot_noisy.jsonl", "eval/pipeline_noisy.jsonl", "eval/summary.json"},
       eval_zero_shot},
      {"fewshot",
       {"slu/student.ckpt", "eval/classifier.ckpt", "data/train_noisy.xmco",
        "data/test_noisy.xmco"},
       {"eval/fewshot.jsonl"},
       fewshot},
      {"report",
       {"eval/pipeline.jsonl", "eval/zero_shot.jsonl", "eval/pipeline_noisy.jsonl",
        "eval/zero_shot_noisy.jsonl", "eval/summary.json", "slu/distill_summary.json",
        "eval/fewshot.jsonl"},
       {"eval/buckets.csv", "eval/buckets_clean.csv", "eval/report.json"},
       report},
  };
  return defs;
}

}  // namespace xmts::harness
