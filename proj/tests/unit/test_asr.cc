// xmts/tests/unit/test_asr.cc

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
#include <functional>
#include <map>
#include <random>

#include "common/test_util.h"
#include "doctest.h"
#include "xmts/asr/ctc.h"
#include "xmts/asr/decode.h"
#include "xmts/asr/loss.h"
#include "xmts/asr/specaug.h"
#include "xmts/asr/train.h"
#include "xmts/diff/autodiff.h"
#include "xmts/diff/errors.h"
#include "xmts/diff/fdcheck.h"
#include "xmts/nnet/averaging.h"

using namespace xmts;
using namespace xmts::asr;
using diff::Tensor;
using xmts::testing::random_tensor;
using xmts::testing::uniform_size;

namespace {

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

double ctc_value(const Tensor& lp, const TokenSequence& target, int blank) {
  Graph g;
  return ctc_loss(g.constant(lp), target, blank).value().item();
}

// Sums the probability of every length-T path that collapses to `target`.
double brute_force_ctc(const Tensor& lp, const TokenSequence& target, int blank) {
  const std::size_t T = lp.rows(), V = lp.cols();
  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    TokenSequence collapsed;
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

// Memoized recursive edit distance, independent of the DP in the library.
std::size_t memo_edit(const TokenSequence& a, const TokenSequence& b, std::size_t i, std::size_t j,
                      std::map<std::pair<std::size_t, std::size_t>, std::size_t>& memo) {
  if (i == a.size()) return b.size() - j;
  if (j == b.size()) return a.size() - i;
  auto key = std::make_pair(i, j);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  std::size_t best = memo_edit(a, b, i + 1, j + 1, memo) + (a[i] != b[j]);
  best = std::min(best, memo_edit(a, b, i + 1, j, memo) + 1);
  best = std::min(best, memo_edit(a, b, i, j + 1, memo) + 1);
  return memo[key] = best;
}

AsrConfig tiny_config() {
  AsrConfig cfg;
  cfg.frame_dim = 4;
  cfg.encoder = {8, 2, 16, 1};
  cfg.decoder_layers = 1;
  return cfg;
}

}  // namespace

TEST_CASE("ctc_loss: hand-derived cases") {
  Tensor one = log_softmax(Tensor::matrix(1, 3, {0.2, 1.0, -0.5}));
  CHECK(ctc_value(one, {1}, 2) == doctest::Approx(-one(0, 1)).epsilon(1e-14));

  Tensor uniform = Tensor::matrix(2, 3, std::log(1.0 / 3.0));
  CHECK(ctc_value(uniform, {0}, 2) == doctest::Approx(std::log(3.0)).epsilon(1e-14));

  Graph g;
  CHECK_THROWS_AS(ctc_loss(g.constant(uniform), {0, 0}, 2), InfeasibleAlignment);
  CHECK_THROWS_AS(ctc_loss(g.constant(uniform), {0, 1, 0}, 2), InfeasibleAlignment);
  CHECK_THROWS_AS(ctc_loss(g.constant(Tensor::matrix(2, 3, 0.0)), {0}, 2), ContractViolation);
  CHECK_THROWS_AS(ctc_loss(g.constant(uniform), {2}, 2), ContractViolation);
  CHECK(ctc_min_frames({1, 1, 2}) == 4);
}

TEST_CASE("ctc_loss: equals exhaustive alignment enumeration") {
  std::mt19937_64 rng(17);
  double worst = 0.0;
  int checked = 0;
  while (checked < 200) {
    const std::size_t V = uniform_size(rng, 2, 3);
    const std::size_t T = uniform_size(rng, 1, 5);
    const std::size_t L = uniform_size(rng, 0, 3);
    const int blank = static_cast<int>(uniform_size(rng, 0, V - 1));
    TokenSequence target;
    for (std::size_t i = 0; i < L; ++i) {
      int t = static_cast<int>(uniform_size(rng, 0, V - 2));
      if (t >= blank) ++t;
      target.push_back(t);
    }
    if (ctc_min_frames(target) > T) continue;
    Tensor lp = log_softmax(random_tensor(rng, T, V, 2.0));
    worst = std::max(worst, std::abs(ctc_value(lp, target, blank) - brute_force_ctc(lp, target, blank)));
    ++checked;
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("ctc_loss: gradient through log-softmax passes finite differences") {
  std::mt19937_64 rng(18);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t V = uniform_size(rng, 2, 4);
    const std::size_t T = uniform_size(rng, 1, 6);
    TokenSequence target;
    for (std::size_t i = 0, L = uniform_size(rng, 0, 3); i < L; ++i)
      target.push_back(static_cast<int>(uniform_size(rng, 0, V - 2)));
    if (ctc_min_frames(target) > T) continue;
    diff::ParamSet ps;
    ps.add("x", random_tensor(rng, T, V));
    const int blank = static_cast<int>(V - 1);
    auto f = [&](Graph& g) { return ctc_loss(diff::log_softmax_rows(g.param("x")), target, blank); };
    worst = std::max(worst, diff::finite_difference_check(f, ps));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("word_error_rate") {
  CHECK(word_error_rate({0, 1, 2}, {0, 1, 2}) == 0.0);
  CHECK(word_error_rate({0, 1, 2}, {0, 9, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK(word_error_rate({0}, {0, 1}) == 1.0);
  CHECK(word_error_rate({0, 1}, {3, 4, 5, 6, 7}) == 2.5);
  CHECK_THROWS_AS(word_error_rate({}, {1}), ContractViolation);

  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    TokenSequence a(uniform_size(rng, 1, 6)), b(uniform_size(rng, 0, 6));
    for (int& t : a) t = static_cast<int>(uniform_size(rng, 0, 3));
    for (int& t : b) t = static_cast<int>(uniform_size(rng, 0, 3));
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    const std::size_t oracle = memo_edit(a, b, 0, 0, memo);
    CHECK(word_error_rate(a, b) == static_cast<double>(oracle) / a.size());
    if (!b.empty()) CHECK(edit_distance(a, b) == edit_distance(b, a));
  }
}

TEST_CASE("spec_augment") {
  std::mt19937_64 r(20);
  Tensor x = random_tensor(r, 12, 6);
  for (double& v : x.storage()) v += 5.0;  // keep originals away from zero
  Rng rng(1);
  auto id = spec_augment(x, {3, 0, 2, 0}, rng);
  CHECK(id.frames == x);

  Rng a(2), b(2);
  SpecAugmentPolicy p{2, 4, 1, 3};
  auto ra = spec_augment(x, p, a);
  auto rb = spec_augment(x, p, b);
  CHECK(ra.frames == rb.frames);
  CHECK(ra.frames.shape() == x.shape());
  for (std::size_t t = 0; t < 12; ++t)
    for (std::size_t f = 0; f < 6; ++f) {
      bool masked = false;
      for (const auto& band : ra.time_bands) masked |= t >= band.start && t < band.start + band.width;
      for (const auto& band : ra.freq_bands) masked |= f >= band.start && f < band.start + band.width;
      CHECK(ra.frames(t, f) == (masked ? 0.0 : x(t, f)));
    }

  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng s(seed);
    auto full = spec_augment(x, {1, 12, 0, 0}, s);
    std::size_t zero_rows = 0;
    for (std::size_t t = 0; t < 12; ++t) zero_rows += full.frames(t, 0) == 0.0;
    CHECK(zero_rows == full.time_bands[0].width);
  }
}

TEST_CASE("frontend subsamples by four") {
  AsrModel m = AsrModel::create(tiny_config(), 3);
  for (std::size_t T : {1, 2, 3, 4, 5, 9, 17, 40}) {
    Graph g(&m.params, false);
    std::mt19937_64 r(T);
    Var enc = asr_encode(m.config, g, g.constant(random_tensor(r, T, 4)));
    CHECK(enc.value().rows() == subsampled_length(T));
    CHECK(subsampled_length(T) == (T + 3) / 4);
  }
  Graph g(&m.params, false);
  CHECK_THROWS_AS(asr_encode(m.config, g, g.constant(Tensor::matrix(4, 5))), ContractViolation);
}

TEST_CASE("asr parameter names follow the checkpoint contract") {
  AsrModel m = AsrModel::create(tiny_config(), 3);
  for (const char* p : {"asr.frontend", "asr.encoder.layer0", "asr.ctc_head", "asr.decoder"})
    CHECK(m.params.has_prefix(p));
  for (const auto& name : m.params.names())
    CHECK((name.rfind("asr.frontend.", 0) == 0 || name.rfind("asr.encoder.layer", 0) == 0 ||
           name.rfind("asr.ctc_head.", 0) == 0 || name.rfind("asr.decoder.", 0) == 0));
  CHECK(m.params.value("asr.ctc_head.weight").cols() == Vocab::kSize);
  CHECK(m.params.value("asr.decoder.out.weight").cols() == Vocab::kSize);
}

TEST_CASE("joint_asr_loss blends the two objectives") {
  AsrModel m = AsrModel::create(tiny_config(), 4);
  std::mt19937_64 r(5);
  Tensor frames = random_tensor(r, 14, 4);
  TokenSequence toks{1, 4, 2};
  auto eval = [&](double lambda) {
    Graph g(&m.params, false);
    return joint_asr_loss(m.config, g, g.constant(frames), toks, {lambda, 0.0}).total.value().item();
  };
  Graph gc(&m.params, false);
  Var enc = asr_encode(m.config, gc, gc.constant(frames));
  const double ctc = ctc_loss(diff::log_softmax_rows(ctc_logits(gc, enc)), toks).value().item();
  Var logits = decoder_logits(m.config, gc, enc, decoder_inputs(toks));
  const double ce = diff::nll_rows(diff::log_softmax_rows(logits), decoder_targets(toks)).value().item();

  CHECK(eval(0.0) == ce);
  CHECK(eval(1.0) == ctc);
  CHECK(eval(0.3) == doctest::Approx(0.3 * ctc + 0.7 * ce).epsilon(1e-13));

  CHECK_THROWS_AS(eval(1.5), ContractViolation);
  Tensor short_frames = random_tensor(r, 4, 4);
  Graph g(&m.params, false);
  CHECK_THROWS_AS(joint_asr_loss(m.config, g, g.constant(short_frames), toks, {0.3, 0.0}),
                  InfeasibleAlignment);
}

TEST_CASE("label smoothing mixes in the uniform cross-entropy") {
  Graph g;
  Var logits = g.constant(Tensor::matrix(2, 3, {0.1, 0.5, -0.2, 1.0, 0.0, 0.3}));
  const double nll = smoothed_cross_entropy(logits, {1, 2}, 0.0).value().item();
  const double sm = smoothed_cross_entropy(logits, {1, 2}, 0.2).value().item();
  Tensor lp = log_softmax(logits.value());
  double uni = 0.0;
  for (double v : lp.data()) uni -= v / 3.0;
  CHECK(sm == doctest::Approx(0.8 * nll + 0.2 * uni).epsilon(1e-13));
}

TEST_CASE("greedy_decode") {
  AsrModel m = AsrModel::create(tiny_config(), 6);
  std::mt19937_64 r(7);
  Tensor frames = random_tensor(r, 16, 4);
  auto a = greedy_decode(m.config, m.params, frames);
  auto b = greedy_decode(m.config, m.params, frames);
  CHECK(a.tokens == b.tokens);
  CHECK(a.truncated == b.truncated);
  CHECK(a.tokens.size() <= decode_length_cap(16));

  AsrModel rigged = m;
  rigged.params.mutable_value("asr.decoder.out.bias")[Vocab::kEos] = 1e3;
  auto empty = greedy_decode(rigged.config, rigged.params, frames);
  CHECK(empty.tokens.empty());
  CHECK_FALSE(empty.truncated);

  AsrModel looping = m;
  looping.params.mutable_value("asr.decoder.out.bias")[3] = 1e3;
  auto capped = greedy_decode(looping.config, looping.params, frames);
  CHECK(capped.truncated);
  CHECK(capped.tokens.size() == decode_length_cap(16));
}

TEST_CASE("train_asr: zero epochs returns the initialization") {
  auto spec = synth::AcousticSpec::make(4, 4, 6, 0.05, 1);
  auto train = synth::generate_classification_corpus(2, 2, spec, 1);
  auto valid = synth::generate_classification_corpus(2, 1, spec, 2, synth::Split::kValid);
  AsrModel m = AsrModel::create(tiny_config(), 1);
  AsrTrainConfig cfg;
  cfg.epochs = 0;
  auto res = train_asr(m, train, valid, cfg);
  CHECK(res.model.params == m.params);
  CHECK(res.checkpoints.empty());
  CHECK(res.averaged_from == 0);
}

TEST_CASE("train_asr: memorizes four utterances and decodes them exactly") {
  auto spec = synth::AcousticSpec::make(4, 4, 6, 0.05, 1);
  auto train = synth::generate_classification_corpus(4, 1, spec, 3);
  AsrConfig mc = tiny_config();
  mc.encoder = {16, 2, 32, 2};
  AsrModel m = AsrModel::create(mc, 2);
  AsrTrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 4;
  cfg.schedule = {40, 0.5, 16};
  cfg.spec_augment = false;
  cfg.average_best = 1;
  auto res = train_asr(m, train, train, cfg);
  REQUIRE_FALSE(res.aborted);
  CHECK(res.metrics.back().train_loss < 0.1);
  for (const auto& u : train.utterances)
    CHECK(greedy_decode(res.model.config, res.model.params, u.frames).tokens == u.tokens);
}

TEST_CASE("train_asr: averaging over the best epochs") {
  auto spec = synth::AcousticSpec::make(4, 4, 6, 0.05, 1);
  auto train = synth::generate_classification_corpus(4, 4, spec, 5);
  auto valid = synth::generate_classification_corpus(4, 2, spec, 6, synth::Split::kValid);
  AsrModel m = AsrModel::create(tiny_config(), 3);
  AsrTrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 4;
  cfg.schedule = {20, 1.0, 8};
  cfg.average_best = 7;
  auto res = train_asr(m, train, valid, cfg);
  REQUIRE(res.checkpoints.size() == 10);
  CHECK(res.averaged_from == 7);
  auto chosen = nnet::select_best(res.checkpoints, 7).chosen;
  double worst = 0.0;
  for (const auto& c : chosen) worst = std::max(worst, c.valid_loss);
  MESSAGE("averaged valid loss " << res.model_valid_loss << ", worst selected " << worst);
  CHECK(res.model_valid_loss <= worst);

  auto again = train_asr(m, train, valid, cfg);
  CHECK(again.model.params == res.model.params);
}
