// xmts/include/xmts/synth/corpus.h

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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xmts/diff/random.h"
#include "xmts/diff/tensor.h"
#include "xmts/synth/vocab.h"

namespace xmts::synth {

using diff::Tensor;

// Frames x frame_dim matrix; values are float32-representable so the corpus
// file round-trips exactly.
using FeatureSequence = Tensor;

struct AcousticSpec {
  std::size_t frame_dim = 8;
  std::size_t frames_min = 4;
  std::size_t frames_max = 8;
  double noise_sigma = 0.05;
  std::uint64_t seed = 7;
  // One prototype row per content token (Vocab::kContent x frame_dim).
  Tensor prototypes;

  // Draws Gaussian prototypes, rejecting candidates closer than
  // `min_distance` to an earlier one.
  static AcousticSpec make(std::size_t frame_dim, std::size_t frames_min, std::size_t frames_max,
                           double noise_sigma, std::uint64_t seed, double min_distance = 1.5);
  double min_prototype_distance() const;
  std::uint64_t fingerprint() const;
};

FeatureSequence render_frames(const TokenSequence& tokens, const AcousticSpec& spec, Rng& rng);

struct Utterance {
  std::string id;
  TokenSequence tokens;
  FeatureSequence frames;
  std::optional<int> label;
  std::optional<double> wer;

  bool operator==(const Utterance&) const = default;
};

enum class Split : std::uint8_t { kTrain = 0, kValid = 1, kTest = 2 };
const char* split_name(Split s);

struct Corpus {
  std::vector<Utterance> utterances;
  Split split = Split::kTrain;
  std::uint64_t fingerprint = 0;
  // Teacher transcripts carry a trailing punctuation marker absent from the
  // ASR targets.
  bool rich_transcripts = false;

  std::size_t size() const { return utterances.size(); }
  // Text the teacher sees for utterance i.
  TokenSequence teacher_tokens(std::size_t i) const;
  bool operator==(const Corpus&) const = default;
};

// --- Class templates -------------------------------------------------------
// Class c is the keyword tuple (k0, k1, k2) laid out as [k0 k1 _ k2 _] where
// the slots hold distractor tokens. Keywords come from a..h, distractors from
// i..l, so adjacent tokens never repeat.
inline constexpr int kMaxClasses = 8;
inline constexpr int kFirstDistractor = 8;

std::vector<int> class_keywords(int cls);
// Classes 2g and 2g+1 form group g; used for the "neutral" pair relation.
inline int template_group(int cls) { return cls / 2; }
TokenSequence sample_class_sentence(int cls, Rng& rng);
// Recovers the class from a clean transcript; -1 when no template matches.
int transcript_oracle(const TokenSequence& tokens, int num_classes);

// Balanced corpus of C * per_class utterances.
Corpus generate_classification_corpus(int num_classes, std::size_t per_class,
                                      const AcousticSpec& spec, std::uint64_t seed,
                                      Split split = Split::kTrain, bool rich = false);
// `total` utterances with label i % C (balanced when C divides total).
Corpus generate_classification_split(int num_classes, std::size_t total,
                                     const AcousticSpec& spec, std::uint64_t seed, Split split,
                                     bool rich = false);

// Same transcripts and labels, frames re-rendered under `spec` (e.g. a larger
// noise level) with a fresh seed.
Corpus rerender(const Corpus& c, const AcousticSpec& spec, std::uint64_t seed);

// Texts with a fixed successor table: each token is followed by succ(prev)
// with probability `follow_prob`, otherwise by a random different token.
int bigram_successor(int token);
std::vector<TokenSequence> generate_bigram_texts(std::size_t count, std::uint64_t seed,
                                                 double follow_prob = 0.9,
                                                 std::size_t min_len = 5,
                                                 std::size_t max_len = 8);

// Unlabeled utterances for arbitrary texts, ids "<prefix>-<i>".
Corpus render_texts(const std::vector<TokenSequence>& texts, const AcousticSpec& spec,
                    std::uint64_t seed, Split split, const std::string& id_prefix);
// Utterances of `a` followed by those of `b`; ids must stay unique.
Corpus concat(const Corpus& a, const Corpus& b);

// --- Persistence -----------------------------------------------------------
// "XMCO" u32 version, u8 split, u8 rich flag, u64 fingerprint, u64 count;
// per utterance: id, u8 has_label [+ u32 label], u32 n + u32 tokens,
// u32 rows, u32 cols, f32 payload, u8 has_wer [+ f64]. Little-endian.
inline constexpr std::uint32_t kCorpusVersion = 1;
void write_corpus(const Corpus& c, const std::string& path);
Corpus read_corpus(const std::string& path);
// "<id>\t<label or ->\t<symbols>" per line.
void write_manifest(const Corpus& c, const std::string& path);

}  // namespace xmts::synth
