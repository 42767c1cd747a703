// xmts/include/xmts/harness/config.h

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
#include <stdexcept>
#include <string>
#include <vector>

#include "xmts/asr/train.h"
#include "xmts/eval/protocol.h"
#include "xmts/nlu/pairs.h"
#include "xmts/nlu/pretrain.h"
#include "xmts/slu/distill.h"

namespace xmts::harness {

// Malformed configuration or command line; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSection {
  int classes = 4;
  std::size_t train_size = 200;
  std::size_t valid_size = 50;
  std::size_t test_size = 100;
  std::size_t frame_dim = 8;
  std::size_t frames_min = 4;
  std::size_t frames_max = 8;
  double noise_sigma = 0.05;
  std::uint64_t prototype_seed = 7;
  bool rich_transcripts = false;
  double noisy_sigma = 1.5;
  // ASR pretraining corpus: sentences from all templates plus bigram texts.
  std::size_t asr_template_sentences = 400;
  std::size_t asr_bigram_texts = 400;
  std::size_t asr_valid_size = 80;
  // NLU pretraining texts.
  std::size_t nlu_template_sentences = 600;
  std::size_t nlu_bigram_texts = 600;
};

struct AsrSection {
  std::size_t dim = 16, heads = 2, ffn_dim = 32, layers = 4;
  std::size_t decoder_layers = 2;
  std::size_t epochs = 24;
  std::size_t batch_size = 16;
  std::size_t warmup = 200;
  double lr_coeff = 0.5;
  double ctc_weight = 0.3;
  double label_smoothing = 0.0;
  bool spec_augment = true;
  std::size_t time_masks = 2, time_width = 4, freq_masks = 1, freq_width = 2;
  std::size_t average_best = 7;
};

struct NluSection {
  std::size_t dim = 24, heads = 3, ffn_dim = 48, layers = 4;
  double mask_prob = 0.15;
  std::size_t mlm_steps = 1500;
  std::size_t mlm_batch_size = 16;
  std::size_t mlm_warmup = 100;
  double mlm_lr_coeff = 0.35;
  std::size_t nli_pairs = 800, nli_steps = 200;
  std::size_t sts_pairs = 800, sts_steps = 50;
  std::size_t heldout_pairs = 200;
  std::size_t pair_batch_size = 16;
  std::size_t pair_warmup = 100;
  double pair_lr_coeff = 0.1;
};

struct SluSection {
  std::string objective = "L1";
  std::size_t k = 2, m = 0;
  std::size_t epochs = 30;
  std::size_t batch_size = 4;
  std::size_t warmup = 100;
  double lr_coeff = 0.1;
  std::vector<std::size_t> ablation_k{0, 1, 2};
  std::vector<std::size_t> ablation_m{0, 1};
};

struct EvalSection {
  std::vector<double> classifier_lrs{1e-3, 1e-2};
  std::vector<std::size_t> classifier_steps{500, 2000};
  std::vector<std::size_t> fewshot_n{0, 10};
  std::size_t fewshot_steps = 300;
  double fewshot_lr = 1e-3;
  std::size_t fewshot_encoder_layers = 2;
  double bucket_width = 10.0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  DataSection data;
  AsrSection asr;
  NluSection nlu;
  SluSection slu;
  EvalSection eval;
};

// Dotted names of every key, in canonical order.
std::vector<std::string> config_keys();

// Applies a YAML document on top of `cfg`. Unknown keys and values of the
// wrong type raise ConfigError naming the key; `origin` labels messages.
void apply_yaml(ExperimentConfig& cfg, const std::string& text, const std::string& origin);
ExperimentConfig load_config(const std::string& path);
// "dotted.key=value" with the value parsed as YAML.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
// Range and consistency checks across keys.
void validate(const ExperimentConfig& cfg);

// Canonical YAML: fixed key order, shortest round-trip numbers.
std::string to_yaml(const ExperimentConfig& cfg);
// FNV-1a of the canonical YAML as 16 hex digits.
std::string fingerprint(const ExperimentConfig& cfg);

// Seed for a named stream, derived from the global seed.
std::uint64_t stream_seed(const ExperimentConfig& cfg, const std::string& tag);

synth::AcousticSpec acoustic_spec(const ExperimentConfig& cfg, double noise_sigma);
asr::AsrConfig asr_model_config(const ExperimentConfig& cfg);
asr::AsrTrainConfig asr_train_config(const ExperimentConfig& cfg);
nlu::NluConfig nlu_model_config(const ExperimentConfig& cfg);
nlu::MlmConfig mlm_config(const ExperimentConfig& cfg);
nlu::PairTrainConfig pair_config(const ExperimentConfig& cfg, std::size_t steps,
                                 const std::string& tag);
slu::StudentConfig student_config(const ExperimentConfig& cfg);
slu::DistillConfig distill_config(const ExperimentConfig& cfg);
eval::FewshotConfig fewshot_config(const ExperimentConfig& cfg);

}  // namespace xmts::harness
