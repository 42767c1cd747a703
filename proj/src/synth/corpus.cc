// xmts/src/synth/corpus.cc

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

#include "xmts/synth/corpus.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "xmts/diff/binio.h"
#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"

namespace xmts::synth {

namespace {

constexpr char kMagic[4] = {'X', 'M', 'C', 'O'};

std::uint64_t fnv(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) h = (h ^ ((v >> (8 * i)) & 0xff)) * 1099511628211ull;
  return h;
}

float as_f32(double v) { return static_cast<float>(v); }

Corpus build_corpus(int num_classes, std::size_t total, const AcousticSpec& spec,
                    std::uint64_t seed, Split split, bool rich) {
  require(num_classes >= 2, "generate_classification_corpus: need at least 2 classes");
  require(num_classes <= kMaxClasses,
          "generate_classification_corpus: " + std::to_string(num_classes) +
              " classes requested but only " + std::to_string(kMaxClasses) +
              " templates exist");
  Corpus c;
  c.split = split;
  c.rich_transcripts = rich;
  std::uint64_t fp = fnv(spec.fingerprint(), seed);
  fp = fnv(fp, static_cast<std::uint64_t>(num_classes));
  fp = fnv(fp, total);
  c.fingerprint = fnv(fp, static_cast<std::uint64_t>(split) * 2 + (rich ? 1 : 0));
  c.utterances.resize(total);
  kernels::parallel_for(total, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    Utterance& u = c.utterances[i];
    const int label = static_cast<int>(i % static_cast<std::size_t>(num_classes));
    u.id = "s" + std::to_string(seed) + "-" + split_name(split) + "-" + std::to_string(i);
    u.label = label;
    u.tokens = sample_class_sentence(label, rng);
    u.frames = render_frames(u.tokens, spec, rng);
  });
  return c;
}

}  // namespace

AcousticSpec AcousticSpec::make(std::size_t frame_dim, std::size_t frames_min,
                                std::size_t frames_max, double noise_sigma, std::uint64_t seed,
                                double min_distance) {
  require(frame_dim >= 1, "acoustic spec: frame_dim must be positive");
  require(frames_min >= 1 && frames_min <= frames_max,
          "acoustic spec: frames-per-token range must satisfy 1 <= min <= max");
  require(noise_sigma >= 0.0, "acoustic spec: noise sigma must be >= 0");
  AcousticSpec s;
  s.frame_dim = frame_dim;
  s.frames_min = frames_min;
  s.frames_max = frames_max;
  s.noise_sigma = noise_sigma;
  s.seed = seed;
  s.prototypes = Tensor::matrix(Vocab::kContent, frame_dim);
  Rng rng(derive_seed(seed, "prototypes"));
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < Vocab::kContent; ++t) {
    for (int attempt = 0;; ++attempt) {
      require(attempt < 10000, "acoustic spec: cannot place prototypes with the requested spacing");
      std::vector<double> cand(frame_dim);
      for (double& v : cand) v = as_f32(nd(rng));
      bool ok = true;
      for (int o = 0; o < t && ok; ++o) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < frame_dim; ++k) {
          const double diff = cand[k] - s.prototypes(o, k);
          d2 += diff * diff;
        }
        ok = std::sqrt(d2) >= min_distance;
      }
      if (!ok) continue;
      for (std::size_t k = 0; k < frame_dim; ++k) s.prototypes(t, k) = cand[k];
      break;
    }
  }
  return s;
}

double AcousticSpec::min_prototype_distance() const {
  double best = INFINITY;
  for (std::size_t a = 0; a < prototypes.rows(); ++a)
    for (std::size_t b = a + 1; b < prototypes.rows(); ++b) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < prototypes.cols(); ++k) {
        const double diff = prototypes(a, k) - prototypes(b, k);
        d2 += diff * diff;
      }
      best = std::min(best, std::sqrt(d2));
    }
  return best;
}

std::uint64_t AcousticSpec::fingerprint() const {
  std::uint64_t h = 14695981039346656037ull;
  h = fnv(h, frame_dim);
  h = fnv(h, frames_min);
  h = fnv(h, frames_max);
  h = fnv(h, std::bit_cast<std::uint64_t>(noise_sigma));
  h = fnv(h, seed);
  for (double v : prototypes.data()) h = fnv(h, std::bit_cast<std::uint64_t>(v));
  return h;
}

FeatureSequence render_frames(const TokenSequence& tokens, const AcousticSpec& spec, Rng& rng) {
  require(!tokens.empty(), "render_frames: empty token sequence");
  require(spec.prototypes.rows() == static_cast<std::size_t>(Vocab::kContent) &&
              spec.prototypes.cols() == spec.frame_dim,
          "render_frames: acoustic spec has no prototype table");
  for (int t : tokens)
    require(Vocab::is_content(t), "render_frames: token '" +
                                      (Vocab::is_valid(t) ? Vocab::symbol(t) : std::to_string(t)) +
                                      "' has no acoustic realization");
  std::uniform_int_distribution<std::size_t> span(spec.frames_min, spec.frames_max);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> data;
  std::size_t rows = 0;
  for (int t : tokens) {
    const std::size_t k = span(rng);
    for (std::size_t f = 0; f < k; ++f, ++rows)
      for (std::size_t d = 0; d < spec.frame_dim; ++d) {
        double v = spec.prototypes(static_cast<std::size_t>(t), d);
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(rng);
        data.push_back(as_f32(v));
      }
  }
  return Tensor::matrix(rows, spec.frame_dim, std::move(data));
}

const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

TokenSequence Corpus::teacher_tokens(std::size_t i) const {
  TokenSequence t = utterances.at(i).tokens;
  if (rich_transcripts) t.push_back(Vocab::kMarker);
  return t;
}

std::vector<int> class_keywords(int cls) {
  require(cls >= 0 && cls < kMaxClasses, "class_keywords: class out of range");
  return {(3 * cls) % 8, (3 * cls + 1) % 8, (3 * cls + 2) % 8};
}

TokenSequence sample_class_sentence(int cls, Rng& rng) {
  const auto kw = class_keywords(cls);
  std::uniform_int_distribution<int> distractor(kFirstDistractor, Vocab::kContent - 1);
  const int s1 = distractor(rng);
  const int s2 = distractor(rng);
  return {kw[0], kw[1], s1, kw[2], s2};
}

int transcript_oracle(const TokenSequence& tokens, int num_classes) {
  if (tokens.size() != 5) return -1;
  for (int c = 0; c < num_classes; ++c) {
    const auto kw = class_keywords(c);
    if (tokens[0] == kw[0] && tokens[1] == kw[1] && tokens[3] == kw[2]) return c;
  }
  return -1;
}

Corpus generate_classification_corpus(int num_classes, std::size_t per_class,
                                      const AcousticSpec& spec, std::uint64_t seed, Split split,
                                      bool rich) {
  return build_corpus(num_classes, per_class * static_cast<std::size_t>(std::max(num_classes, 0)),
                      spec, seed, split, rich);
}

Corpus generate_classification_split(int num_classes, std::size_t total,
                                     const AcousticSpec& spec, std::uint64_t seed, Split split,
                                     bool rich) {
  return build_corpus(num_classes, total, spec, seed, split, rich);
}

Corpus rerender(const Corpus& c, const AcousticSpec& spec, std::uint64_t seed) {
  Corpus out = c;
  out.fingerprint = fnv(fnv(c.fingerprint, spec.fingerprint()), seed);
  kernels::parallel_for(out.utterances.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    out.utterances[i].frames = render_frames(out.utterances[i].tokens, spec, rng);
    out.utterances[i].wer.reset();
  });
  return out;
}

Corpus render_texts(const std::vector<TokenSequence>& texts, const AcousticSpec& spec,
                    std::uint64_t seed, Split split, const std::string& id_prefix) {
  Corpus c;
  c.split = split;
  std::uint64_t fp = fnv(fnv(spec.fingerprint(), seed), texts.size());
  for (const auto& t : texts)
    for (int tok : t) fp = fnv(fp, static_cast<std::uint64_t>(tok));
  c.fingerprint = fp;
  c.utterances.resize(texts.size());
  kernels::parallel_for(texts.size(), [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    Utterance& u = c.utterances[i];
    u.id = id_prefix + "-" + std::to_string(i);
    u.tokens = texts[i];
    u.frames = render_frames(u.tokens, spec, rng);
  });
  return c;
}

Corpus concat(const Corpus& a, const Corpus& b) {
  require(a.rich_transcripts == b.rich_transcripts, "concat: transcript styles differ");
  Corpus out = a;
  out.fingerprint = fnv(a.fingerprint, b.fingerprint);
  std::set<std::string> ids;
  for (const auto& u : a.utterances) ids.insert(u.id);
  for (const auto& u : b.utterances) {
    require(ids.insert(u.id).second, "concat: duplicate id " + u.id);
    out.utterances.push_back(u);
  }
  return out;
}

int bigram_successor(int token) {
  require(Vocab::is_content(token), "bigram_successor: not a content token");
  return (5 * token + 3) % Vocab::kContent;
}

std::vector<TokenSequence> generate_bigram_texts(std::size_t count, std::uint64_t seed,
                                                 double follow_prob, std::size_t min_len,
                                                 std::size_t max_len) {
  require(min_len >= 1 && min_len <= max_len, "generate_bigram_texts: bad length range");
  std::vector<TokenSequence> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, i));
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<int> any(0, Vocab::kContent - 1);
    std::uniform_int_distribution<int> other(0, Vocab::kContent - 2);
    std::bernoulli_distribution follow(follow_prob);
    const std::size_t n = len(rng);
    TokenSequence& t = out[i];
    t.push_back(any(rng));
    while (t.size() < n) {
      const int prev = t.back();
      if (follow(rng)) {
        t.push_back(bigram_successor(prev));
      } else {
        int o = other(rng);
        if (o >= prev) ++o;
        t.push_back(o);
      }
    }
  }
  return out;
}

void write_corpus(const Corpus& c, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(LoadError::Kind::kIo, "cannot open '" + path + "' for writing");
  diff::BinaryWriter w(os);
  w.bytes(kMagic, 4);
  w.u32(kCorpusVersion);
  w.u8(static_cast<std::uint8_t>(c.split));
  w.u8(c.rich_transcripts ? 1 : 0);
  w.u64(c.fingerprint);
  w.u64(c.utterances.size());
  for (const Utterance& u : c.utterances) {
    w.str(u.id);
    w.u8(u.label ? 1 : 0);
    if (u.label) w.u32(static_cast<std::uint32_t>(*u.label));
    w.u32(static_cast<std::uint32_t>(u.tokens.size()));
    for (int t : u.tokens) w.u32(static_cast<std::uint32_t>(t));
    w.u32(static_cast<std::uint32_t>(u.frames.rows()));
    w.u32(static_cast<std::uint32_t>(u.frames.cols()));
    for (double v : u.frames.data()) w.f32(static_cast<float>(v));
    w.u8(u.wer ? 1 : 0);
    if (u.wer) w.f64(*u.wer);
  }
  if (!w.ok()) throw LoadError(LoadError::Kind::kIo, "write failed for '" + path + "'");
}

Corpus read_corpus(const std::string& path) {
  using K = LoadError::Kind;
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(K::kIo, "cannot open corpus '" + path + "'");
  diff::BinaryReader r(is, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw LoadError(K::kMagicMismatch, path + ": not a corpus file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCorpusVersion)
    throw LoadError(K::kVersionMismatch,
                    path + ": unsupported corpus version " + std::to_string(version));
  Corpus c;
  const std::uint8_t split = r.u8();
  if (split > 2) throw LoadError(K::kMalformed, path + ": bad split tag");
  c.split = static_cast<Split>(split);
  c.rich_transcripts = r.u8() != 0;
  c.fingerprint = r.u64();
  const std::uint64_t count = r.u64();
  if (count > (1u << 24)) throw LoadError(K::kMalformed, path + ": implausible utterance count");
  std::set<std::string> seen;
  c.utterances.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Utterance u;
    u.id = r.str(4096);
    if (!seen.insert(u.id).second)
      throw LoadError(K::kDuplicate, path + ": duplicate utterance id '" + u.id + "'");
    if (r.u8()) u.label = static_cast<int>(r.u32());
    const std::uint32_t nt = r.u32();
    if (nt > 4096) throw LoadError(K::kMalformed, path + ": token list too long");
    u.tokens.resize(nt);
    for (int& t : u.tokens) {
      t = static_cast<int>(r.u32());
      if (!Vocab::is_valid(t)) throw LoadError(K::kMalformed, path + ": bad token id");
    }
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    if (rows == 0 || cols == 0 || rows > 65536 || cols > 4096)
      throw LoadError(K::kMalformed, path + ": bad frame matrix dims");
    std::vector<double> data(static_cast<std::size_t>(rows) * cols);
    for (double& v : data) v = static_cast<double>(r.f32());
    u.frames = Tensor::matrix(rows, cols, std::move(data));
    if (r.u8()) u.wer = r.f64();
    c.utterances.push_back(std::move(u));
  }
  return c;
}

void write_manifest(const Corpus& c, const std::string& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw LoadError(LoadError::Kind::kIo, "cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < c.utterances.size(); ++i) {
    const Utterance& u = c.utterances[i];
    os << u.id << '\t' << (u.label ? std::to_string(*u.label) : "-") << '\t'
       << Vocab::join(c.teacher_tokens(i)) << '\n';
  }
}

}  // namespace xmts::synth
