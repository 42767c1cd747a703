// xmts/tests/acceptance/acceptance.cc

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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "xmts/asr/ctc.h"
#include "xmts/asr/decode.h"
#include "xmts/diff/autodiff.h"
#include "xmts/diff/checkpoint.h"
#include "xmts/diff/fdcheck.h"
#include "xmts/diff/ops.h"
#include "xmts/harness/run.h"
#include "xmts/nnet/averaging.h"
#include "xmts/nnet/transformer.h"

using namespace xmts;
using diff::Graph;
using diff::ParamSet;
using diff::Tensor;
using diff::Var;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

Tensor random_tensor(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  Tensor t = Tensor::matrix(rows, cols);
  for (double& v : t.storage()) v = nd(rng);
  return t;
}

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Tensor log_softmax(const Tensor& x) {
  Tensor out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double m = -INFINITY;
    for (std::size_t c = 0; c < x.cols(); ++c) m = std::max(m, x(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) z += std::exp(x(r, c) - m);
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = x(r, c) - m - std::log(z);
  }
  return out;
}

// --- 1. Gradient soundness --------------------------------------------------

Verdict gradient_soundness() {
  const auto t0 = Clock::now();
  constexpr int kCases = 100;
  std::map<std::string, double> worst;
  std::mt19937_64 r(101);

  for (int i = 0; i < kCases; ++i) {  // attention block
    const std::size_t h = std::size_t{1} << uniform(r, 0, 2);
    nnet::TransformerStack stack("s", {4, h, 3, 1});
    ParamSet ps;
    Rng rng(1000 + i);
    stack.init(ps, rng);
    const std::size_t t = uniform(r, 1, 4);
    ps.add("x", random_tensor(r, t, 4));
    nnet::ValidMask mask(t, 1);
    if (t > 1 && i % 2) mask[t - 1] = 0;
    const Tensor w = random_tensor(r, t, 4);
    auto f = [&](Graph& g) {
      return diff::sum(diff::mul(stack.encode(g, g.param("x"), mask), g.constant(w)));
    };
    worst["attention block"] = std::max(worst["attention block"], diff::finite_difference_check(f, ps));
  }

  for (int i = 0; i < kCases; ++i) {  // masked mean pooling
    const std::size_t t = uniform(r, 1, 6), d = uniform(r, 1, 5);
    ParamSet ps;
    ps.add("x", random_tensor(r, t, d));
    nnet::ValidMask mask(t, 1);
    for (std::size_t j = 1; j < t; ++j) mask[j] = uniform(r, 0, 1);
    const Tensor w = random_tensor(r, 1, d);
    auto f = [&](Graph& g) {
      return diff::sum(diff::mul(diff::mean_rows(g.param("x"), mask), g.constant(w)));
    };
    worst["mean pooling"] = std::max(worst["mean pooling"], diff::finite_difference_check(f, ps));
  }

  for (int i = 0; i < kCases; ++i) {  // CTC through log-softmax
    const std::size_t V = uniform(r, 2, 4), T = uniform(r, 2, 6);
    const int blank = static_cast<int>(uniform(r, 0, V - 1));
    synth::TokenSequence target;
    const std::size_t L = uniform(r, 0, 2);
    for (std::size_t j = 0; j < L; ++j) {
      int tok = static_cast<int>(uniform(r, 0, V - 2));
      if (tok >= blank) ++tok;
      target.push_back(tok);
    }
    if (asr::ctc_min_frames(target) > T) {
      --i;
      continue;
    }
    ParamSet ps;
    ps.add("z", random_tensor(r, T, V));
    auto f = [&](Graph& g) { return asr::ctc_loss(diff::log_softmax_rows(g.param("z")), target, blank); };
    worst["ctc"] = std::max(worst["ctc"], diff::finite_difference_check(f, ps));
  }

  for (auto kind : {slu::DistanceKind::kCosine, slu::DistanceKind::kL2, slu::DistanceKind::kL1}) {
    const std::string name = std::string("distance ") + slu::distance_name(kind);
    for (int i = 0; i < kCases; ++i) {
      const std::size_t d = uniform(r, 1, 8);
      Tensor a = random_tensor(r, 1, d), b = random_tensor(r, 1, d);
      // |x| has a kink at 0; keep L1 cases away from it.
      bool near_kink = false;
      for (std::size_t j = 0; j < d; ++j) near_kink |= std::abs(a(0, j) - b(0, j)) < 1e-3;
      if (kind == slu::DistanceKind::kL1 && near_kink) {
        --i;
        continue;
      }
      ParamSet ps;
      ps.add("a", a);
      ps.add("b", b);
      auto f = [&](Graph& g) { return slu::distance(g.param("a"), g.param("b"), kind); };
      worst[name] = std::max(worst[name], diff::finite_difference_check(f, ps));
    }
  }

  for (int i = 0; i < kCases; ++i) {  // cosine-MSE pair loss through a small encoder
    nlu::NluConfig cfg;
    cfg.encoder = {4, uniform(r, 1, 2), 4, 1};
    const auto model = nlu::NluModel::create(cfg, 200 + i);
    nlu::SentencePair p;
    for (auto* s : {&p.a, &p.b})
      for (std::size_t j = 0, n = uniform(r, 1, 4); j < n; ++j)
        s->push_back(static_cast<int>(uniform(r, 0, synth::Vocab::kContent - 1)));
    p.similarity = std::uniform_real_distribution<double>(-1.0, 1.0)(r);
    ParamSet ps;
    for (const auto& [name, prm] : model.params)
      if (name.rfind("nlu.mlm_head", 0) != 0) ps.add(name, prm.value);
    auto f = [&](Graph& g) { return nlu::similarity_loss(cfg, g, p); };
    worst["cosine-MSE pair loss"] =
        std::max(worst["cosine-MSE pair loss"], diff::finite_difference_check(f, ps));
  }

  for (int i = 0; i < kCases; ++i) {  // classifier cross-entropy
    const std::size_t d = uniform(r, 1, 6), n = uniform(r, 1, 5);
    const int c = static_cast<int>(uniform(r, 2, 5));
    auto clf = eval::Classifier::zeros(d, c);
    for (double& v : clf.params.mutable_value("clf.weight").storage()) v = std::normal_distribution<double>()(r);
    for (double& v : clf.params.mutable_value("clf.bias").storage()) v = std::normal_distribution<double>()(r);
    const Tensor x = random_tensor(r, n, d);
    std::vector<int> labels(n);
    for (auto& l : labels) l = static_cast<int>(uniform(r, 0, static_cast<std::size_t>(c - 1)));
    auto f = [&](Graph& g) { return eval::classifier_loss(g, g.constant(x), labels); };
    worst["classifier CE"] =
        std::max(worst["classifier CE"], diff::finite_difference_check(f, clf.params, 1e-6));
  }

  const double secs = seconds_since(t0);
  double overall = 0.0;
  std::string detail;
  for (const auto& [name, w] : worst) {
    overall = std::max(overall, w);
    detail += name + " " + num(w, 2) + "; ";
  }
  return {overall <= 1e-4 && secs < 120.0,
          detail + std::to_string(worst.size()) + " ops x " + std::to_string(kCases) +
              " cases, max rel err " + num(overall, 2) + ", " + num(secs, 3) + " s"};
}

// --- 2. CTC oracle -----------------------------------------------------------

double brute_force_ctc(const Tensor& lp, const synth::TokenSequence& target, int blank) {
  const std::size_t T = lp.rows(), V = lp.cols();
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    synth::TokenSequence collapsed;
    int prev = -1;
    double logp = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      logp += lp(t, path[t]);
      if (path[t] != prev && path[t] != blank) collapsed.push_back(path[t]);
      prev = path[t];
    }
    if (collapsed == target) total += std::exp(logp);
    std::size_t pos = 0;
    while (pos < T && ++path[pos] == static_cast<int>(V)) path[pos++] = 0;
    if (pos == T) break;
  }
  return -std::log(total);
}

Verdict ctc_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 r(202);
  double worst = 0.0;
  int checked = 0;
  while (checked < 200) {
    const std::size_t V = uniform(r, 2, 3), T = uniform(r, 1, 5), L = uniform(r, 0, 3);
    const int blank = static_cast<int>(uniform(r, 0, V - 1));
    synth::TokenSequence target;
    for (std::size_t i = 0; i < L; ++i) {
      int tok = static_cast<int>(uniform(r, 0, V - 2));
      if (tok >= blank) ++tok;
      target.push_back(tok);
    }
    if (asr::ctc_min_frames(target) > T) continue;
    const Tensor lp = log_softmax(random_tensor(r, T, V, 2.0));
    Graph g;
    const double got = asr::ctc_loss(g.constant(lp), target, blank).value().item();
    worst = std::max(worst, std::abs(got - brute_force_ctc(lp, target, blank)));
    ++checked;
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 30.0, "200 instances, max |diff| " + num(worst, 2) + ", " +
                                            num(secs, 3) + " s"};
}

// --- 3. WER oracle -----------------------------------------------------------

std::size_t memo_edit(const synth::TokenSequence& a, const synth::TokenSequence& b, std::size_t i,
                      std::size_t j, std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  const auto key = std::make_pair(i, j);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t best = memo_edit(a, b, i + 1, j + 1, memo) + (a[i] != b[j]);
  best = std::min(best, memo_edit(a, b, i + 1, j, memo) + 1);
  best = std::min(best, memo_edit(a, b, i, j + 1, memo) + 1);
  return memo[key] = best;
}

Verdict wer_oracle() {
  std::mt19937_64 r(303);
  int mismatches = 0;
  for (int i = 0; i < 500; ++i) {
    synth::TokenSequence ref(uniform(r, 1, 6)), hyp(uniform(r, 0, 6));
    const std::size_t alphabet = uniform(r, 2, 5);
    for (auto& t : ref) t = static_cast<int>(uniform(r, 0, alphabet - 1));
    for (auto& t : hyp) t = static_cast<int>(uniform(r, 0, alphabet - 1));
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    const double oracle = static_cast<double>(memo_edit(ref, hyp, 0, 0, memo)) / ref.size();
    mismatches += asr::word_error_rate(ref, hyp) != oracle;
  }
  return {mismatches == 0, "500 pairs, " + std::to_string(mismatches) + " mismatches"};
}

// --- 4. Schedule ---------------------------------------------------------------

Verdict schedule() {
  auto closed = [](const nnet::LrSchedule& s, double step) {
    return s.coeff / std::sqrt(static_cast<double>(s.dim)) *
           std::min(1.0 / std::sqrt(step), step * std::pow(static_cast<double>(s.warmup), -1.5));
  };
  std::mt19937_64 r(404);
  std::vector<nnet::LrSchedule> cases{{300000, 50.0, 512}};
  for (int i = 0; i < 20; ++i)
    cases.push_back({uniform(r, 4, 400000), std::uniform_real_distribution<double>(0.01, 100.0)(r),
                     uniform(r, 1, 1024)});
  double worst = 0.0;
  for (const auto& s : cases)
    for (std::uint64_t step : {std::uint64_t{1}, s.warmup / 4, s.warmup, 4 * s.warmup}) {
      const double want = closed(s, static_cast<double>(step));
      worst = std::max(worst, std::abs(nnet::noam_lr(s, step) - want) / want);
    }
  const double peak = nnet::noam_lr(cases[0], 300000);
  const bool peak_ok = std::abs(peak - 4.034e-3) <= 0.0005e-3;
  return {worst <= 1e-12 && peak_ok, std::to_string(cases.size()) + " schedules, max rel err " +
                                         num(worst, 2) + ", peak(k=50, D=512, w=300000) " +
                                         num(peak, 6)};
}

// --- 5. Freeze / teacher immutability ------------------------------------------

Verdict freeze(const harness::ExperimentConfig& cfg) {
  auto asr_model = asr::AsrModel::create(harness::asr_model_config(cfg), 51);
  auto teacher = nlu::NluModel::create(harness::nlu_model_config(cfg), 52);
  const auto student = slu::assemble_student(asr_model, teacher, 53);
  const auto spec = harness::acoustic_spec(cfg, cfg.data.noise_sigma);
  const auto train = synth::generate_classification_split(cfg.data.classes, 200, spec, 54,
                                                          synth::Split::kTrain);
  const auto valid = synth::generate_classification_split(cfg.data.classes, 50, spec, 55,
                                                          synth::Split::kValid);
  auto dc = harness::distill_config(cfg);
  dc.batch_size = 4;
  dc.epochs = 2;  // 200 / 4 * 2 = 100 steps
  const auto mask = slu::distill_mask(student.config, dc.asr_layers_to_tune, dc.nlu_layers_to_tune);
  std::vector<std::string> fixed;
  for (const auto& name : student.params.names())
    if (!mask.selects(name)) fixed.push_back(name);
  const auto teacher_before = teacher.params.checksum();
  const auto fixed_before = student.params.checksum_of(fixed);
  const auto res = slu::distill(student, teacher, train, valid, dc);
  const bool same_teacher = teacher.params.checksum() == teacher_before;
  const bool same_fixed = res.student.params.checksum_of(fixed) == fixed_before;
  const bool moved = res.student.params.checksum() != student.params.checksum();
  return {res.steps == 100 && same_teacher && same_fixed && moved,
          std::to_string(res.steps) + " steps, teacher " + (same_teacher ? "unchanged" : "CHANGED") +
              ", " + std::to_string(fixed.size()) + " frozen student tensors " +
              (same_fixed ? "unchanged" : "CHANGED") + ", trainable tensors " +
              (moved ? "moved" : "did not move")};
}

// --- 6. Checkpoint averaging ------------------------------------------------------

Verdict averaging() {
  std::mt19937_64 r(606);
  std::vector<diff::ModelCheckpoint> ck(7);
  for (std::size_t i = 0; i < ck.size(); ++i) {
    ck[i].params.add("a", random_tensor(r, 5, 7));
    ck[i].params.add("b", random_tensor(r, 1, 9, 1e3));
    ck[i].step = i;
  }
  const auto avg = nnet::average_checkpoints(ck);
  std::size_t mismatches = 0, entries = 0;
  for (const std::string name : {"a", "b"}) {
    const auto& got = avg.params.value(name);
    for (std::size_t e = 0; e < got.size(); ++e) {
      // Mandated order: values sorted ascending, summed left to right.
      std::vector<double> col;
      for (const auto& c : ck) col.push_back(c.params.value(name)[e]);
      std::sort(col.begin(), col.end());
      double s = 0.0;
      for (double v : col) s += v;
      mismatches += got[e] != s / 7.0;
      ++entries;
    }
  }
  return {mismatches == 0 && avg.source_count == 7,
          std::to_string(entries) + " entries over 7 checkpoints, " + std::to_string(mismatches) +
              " mismatches"};
}

// --- Chain-based criteria ---------------------------------------------------------

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::vector<json> read_jsonl(const fs::path& p) {
  std::ifstream in(p);
  std::vector<json> rows;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(json::parse(line));
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, double> run_chain(const harness::RunOptions& opts) {
  std::map<std::string, double> secs;
  for (const auto& s : harness::stages()) {
    const auto t0 = Clock::now();
    harness::run_stage(s.name, opts);
    secs[s.name] = seconds_since(t0);
  }
  return secs;
}

Verdict distill_reduces(const fs::path& run, double distill_secs) {
  const auto rows = read_jsonl(run / "slu/distill_metrics.jsonl");
  const double first = rows.front().at("valid_distance").get<double>();
  const double last = rows.back().at("valid_distance").get<double>();
  const auto epochs = rows.back().at("epoch").get<std::size_t>();
  return {last <= 0.5 * first && epochs <= 30 && distill_secs < 600.0,
          "valid L1 " + num(first) + " -> " + num(last) + " (ratio " + num(last / first, 3) +
              ") after " + std::to_string(epochs) + " epochs, " + num(distill_secs, 3) + " s"};
}

Verdict zero_shot(const fs::path& run, const harness::ExperimentConfig& cfg) {
  const auto s = read_json(run / "eval/summary.json");
  const double zs = s.at("zero_shot_accuracy"), und = s.at("undistilled_accuracy");

  // Spread of the undistilled baseline over bridge initializations, for context.
  harness::StageContext ctx{cfg, run};
  auto asr_model = asr::AsrModel::create(harness::asr_model_config(cfg), 0);
  asr_model.params = diff::load_checkpoint(ctx.path("asr/model.ckpt")).params;
  auto teacher = nlu::NluModel::create(harness::nlu_model_config(cfg), 0);
  teacher.params = diff::load_checkpoint(ctx.path("nlu/teacher.ckpt")).params;
  auto clf = eval::Classifier::zeros(cfg.nlu.dim, cfg.data.classes);
  clf.params = diff::load_checkpoint(ctx.path("eval/classifier.ckpt")).params;
  const auto test = synth::read_corpus(ctx.path("data/test.xmco"));
  std::string spread;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto c = cfg;
    c.seed = seed;
    const auto student = slu::assemble_student(asr_model, teacher, harness::stream_seed(c, "slu.bridge"));
    spread += (seed > 1 ? " " : "") + num(eval::zero_shot(student, clf, test).accuracy, 3);
  }
  std::cout << "  info [8] undistilled accuracy for global seeds 1..5: " << spread << "\n";
  return {zs >= 0.80 && und <= 0.35, "distilled " + num(zs, 3) + " (>= 0.80), undistilled " +
                                         num(und, 3) + " (<= 0.35), chance " +
                                         num(1.0 / cfg.data.classes, 3)};
}

Verdict fewshot(const fs::path& run) {
  const auto zs_rows = read_jsonl(run / "eval/zero_shot_noisy.jsonl");
  const auto& zs_summary = zs_rows.back();
  const double zs = zs_summary.at("accuracy");
  const auto zs_correct = zs_summary.at("correct").get<std::size_t>();
  std::map<std::pair<std::size_t, std::string>, json> rows;
  for (const auto& r : read_jsonl(run / "eval/fewshot.jsonl"))
    rows[{r.at("n").get<std::size_t>(), r.at("mode").get<std::string>()}] = r;
  const std::string out = eval::fewshot_mode_name(eval::FewshotMode::kOutputOnly);
  const std::string enc = eval::fewshot_mode_name(eval::FewshotMode::kOutputPlusEncoderLayers);
  if (!rows.count({10, out}) || !rows.count({10, enc}) || !rows.count({0, out}) || !rows.count({0, enc}))
    return {false, "fewshot.jsonl lacks n=0 or n=10 rows"};
  const double a_out = rows[{10, out}].at("accuracy"), a_enc = rows[{10, enc}].at("accuracy");
  const bool n0 = rows[{0, out}].at("correct").get<std::size_t>() == zs_correct &&
                  rows[{0, enc}].at("correct").get<std::size_t>() == zs_correct;
  const bool improves = a_out >= zs + 0.02 - 1e-12 && a_enc >= zs + 0.02 - 1e-12;
  return {improves && a_enc >= a_out && n0,
          "noisy test: zero-shot " + num(zs, 3) + ", n=10 " + out + " " + num(a_out, 3) + ", " +
              enc + " " + num(a_enc, 3) + ", n=0 " + (n0 ? "matches" : "DIFFERS from") +
              " zero-shot"};
}

Verdict ablation(const fs::path& run) {
  std::ifstream in(run / "slu/ablation.csv");
  std::string line;
  std::getline(in, line);
  double best = INFINITY;
  std::size_t bk = 0, bm = 0;
  std::string table;
  while (std::getline(in, line)) {
    std::stringstream ls(line);
    std::string k, m, v;
    std::getline(ls, k, ',');
    std::getline(ls, m, ',');
    std::getline(ls, v, ',');
    const double d = v == "null" ? INFINITY : std::stod(v);
    table += "(" + k + "," + m + ")=" + num(d, 3) + " ";
    if (d < best) best = d, bk = std::stoul(k), bm = std::stoul(m);
  }
  return {bk >= 1 && bm == 0, table + "best at k=" + std::to_string(bk) + ", m=" + std::to_string(bm)};
}

Verdict wer_buckets(const fs::path& run, const harness::ExperimentConfig& cfg) {
  harness::StageContext ctx{cfg, run};
  auto asr_model = asr::AsrModel::create(harness::asr_model_config(cfg), 0);
  asr_model.params = diff::load_checkpoint(ctx.path("asr/model.ckpt")).params;
  auto teacher = nlu::NluModel::create(harness::nlu_model_config(cfg), 0);
  teacher.params = diff::load_checkpoint(ctx.path("nlu/teacher.ckpt")).params;
  auto student = slu::assemble_student(asr_model, teacher, 0);
  student.params = diff::load_checkpoint(ctx.path("slu/student.ckpt")).params;
  auto clf = eval::Classifier::zeros(cfg.nlu.dim, cfg.data.classes);
  clf.params = diff::load_checkpoint(ctx.path("eval/classifier.ckpt")).params;
  const auto test = synth::read_corpus(ctx.path("data/test.xmco"));

  auto corpus_wer = [&](const eval::EvalResult& r, const synth::Corpus& c) {
    double edits = 0, words = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double n = static_cast<double>(c.utterances[i].tokens.size());
      edits += std::round(r.records[i].wer.value_or(0.0) * n);
      words += n;
    }
    return edits / words;
  };

  // Raise the noise until the pipeline's corpus WER reaches 25%.
  double sigma = NAN;
  eval::EvalResult pipe, e2e;
  std::string ladder;
  for (double s : {0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.4}) {
    const auto noisy = synth::rerender(test, harness::acoustic_spec(cfg, s),
                                       harness::stream_seed(cfg, "data.noisy.test"));
    pipe = eval::pipeline_baseline(asr_model, teacher, clf, noisy);
    const double wer = corpus_wer(pipe, noisy);
    ladder += num(s, 2) + ":" + num(wer, 3) + " ";
    if (wer >= 0.25) {
      sigma = s;
      e2e = eval::zero_shot(student, clf, noisy);
      break;
    }
  }
  std::cout << "  info [11] sigma -> corpus WER: " << ladder << "\n";
  if (std::isnan(sigma)) return {false, "no noise level reached 25% WER"};

  const auto rep = eval::wer_bucket_report(pipe, e2e, cfg.eval.bucket_width);
  std::size_t high_n = 0, high_correct = 0, counted = 0;
  for (const auto& b : rep.buckets) {
    counted += b.count;
    if (b.lo >= 30.0) high_n += b.count, high_correct += b.pipeline_correct;
  }
  const double low_acc = rep.buckets.front().pipeline_acc();
  const double high_acc = high_n ? static_cast<double>(high_correct) / high_n : NAN;
  const bool partition = counted + rep.excluded == test.size() && rep.total == test.size();

  // The chain's own report must partition its noisy test set too.
  std::ifstream csv(run / "eval/buckets.csv");
  std::string line;
  std::getline(csv, line);
  std::size_t csv_total = 0;
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::vector<std::string> cells;
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    csv_total += std::stoul(cells[2]);
  }
  const bool csv_ok = csv_total == synth::read_corpus(ctx.path("data/test_noisy.xmco")).size();

  return {high_n > 0 && high_acc < low_acc && partition && csv_ok,
          "sigma " + num(sigma, 2) + ": pipeline acc [0,10) " + num(low_acc, 3) + " (n=" +
              std::to_string(rep.buckets.front().count) + ") vs >=30% " + num(high_acc, 3) +
              " (n=" + std::to_string(high_n) + "), excluded " + std::to_string(rep.excluded) +
              ", partition " + (partition && csv_ok ? "exact" : "BROKEN")};
}

Verdict determinism(const fs::path& a, const fs::path& b) {
  std::size_t files = 0;
  std::vector<std::string> differing;
  for (const auto& s : harness::stages())
    for (const auto& out : s.outputs) {
      ++files;
      if (slurp(a / out) != slurp(b / out)) differing.push_back(out);
    }
  const auto ma = harness::Manifest::load(a / "manifest.json");
  const auto mb = harness::Manifest::load(b / "manifest.json");
  bool manifests = ma.run_id == mb.run_id;
  for (const auto& [name, rec] : ma.stages) manifests &= mb.stages.at(name).outputs == rec.outputs;
  std::string detail = std::to_string(files) + " artifacts compared, " +
                       std::to_string(differing.size()) + " differ";
  for (const auto& d : differing) detail += " " + d;
  return {differing.empty() && manifests, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string workdir = (fs::temp_directory_path() / "xmts_acceptance").string();
  std::string config_path;
  bool keep = false;
  app.add_option("--workdir", workdir, "Scratch directory for the two chain runs");
  app.add_option("--config", config_path, "Config for the chain runs")->check(CLI::ExistingFile);
  app.add_flag("--keep", keep, "Keep the run directories");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << v.detail
              << std::endl;
  };

  harness::RunOptions opts;
  opts.config_path = config_path;
  const auto cfg = harness::resolve_config(opts);

  report(1, "gradient soundness", gradient_soundness);
  report(2, "CTC oracle equivalence", ctc_oracle);
  report(3, "WER oracle equivalence", wer_oracle);
  report(4, "schedule correctness", schedule);
  report(5, "freeze and teacher immutability", [&] { return freeze(cfg); });
  report(6, "checkpoint averaging", averaging);

  const fs::path run_a = fs::path(workdir) / "run_a", run_b = fs::path(workdir) / "run_b";
  fs::remove_all(workdir);
  std::map<std::string, double> secs_a;
  bool chains_ok = true;
  std::string chain_error;
  try {
    auto oa = opts;
    oa.out = run_a.string();
    secs_a = run_chain(oa);
    auto ob = opts;
    ob.out = run_b.string();
    run_chain(ob);
  } catch (const std::exception& e) {
    chains_ok = false;
    chain_error = e.what();
  }
  auto chain_check = [&](const std::function<Verdict()>& f) {
    return [&, f] { return chains_ok ? f() : Verdict{false, "chain failed: " + chain_error}; };
  };
  if (chains_ok) {
    double total = 0.0;
    for (const auto& [name, s] : secs_a) total += s;
    std::cout << "  info chain runtime " << num(total, 3) << " s\n";
  }

  report(7, "distillation reduces alignment distance",
         chain_check([&] { return distill_reduces(run_a, secs_a["distill"]); }));
  report(8, "zero-shot cross-modal transfer", chain_check([&] { return zero_shot(run_a, cfg); }));
  report(9, "few-shot improvement and mode ordering", chain_check([&] { return fewshot(run_a); }));
  report(10, "layer-ablation trend", chain_check([&] { return ablation(run_a); }));
  report(11, "WER-bucket degradation", chain_check([&] { return wer_buckets(run_a, cfg); }));
  report(12, "determinism", chain_check([&] { return determinism(run_a, run_b); }));

  if (!keep) fs::remove_all(workdir);
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
