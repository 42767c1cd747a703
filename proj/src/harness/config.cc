// xmts/src/harness/config.cc

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

#include "xmts/harness/config.h"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "xmts/diff/errors.h"
#include "xmts/diff/random.h"

namespace xmts::harness {

namespace {

template <class C, class F>
void visit(C& c, F&& f) {
  f("seed", c.seed);
  f("data.classes", c.data.classes);
  f("data.train_size", c.data.train_size);
  f("data.valid_size", c.data.valid_size);
  f("data.test_size", c.data.test_size);
  f("data.frame_dim", c.data.frame_dim);
  f("data.frames_min", c.data.frames_min);
  f("data.frames_max", c.data.frames_max);
  f("data.noise_sigma", c.data.noise_sigma);
  f("data.prototype_seed", c.data.prototype_seed);
  f("data.rich_transcripts", c.data.rich_transcripts);
  f("data.noisy_sigma", c.data.noisy_sigma);
  f("data.asr_template_sentences", c.data.asr_template_sentences);
  f("data.asr_bigram_texts", c.data.asr_bigram_texts);
  f("data.asr_valid_size", c.data.asr_valid_size);
  f("data.nlu_template_sentences", c.data.nlu_template_sentences);
  f("data.nlu_bigram_texts", c.data.nlu_bigram_texts);
  f("asr.dim", c.asr.dim);
  f("asr.heads", c.asr.heads);
  f("asr.ffn_dim", c.asr.ffn_dim);
  f("asr.layers", c.asr.layers);
  f("asr.decoder_layers", c.asr.decoder_layers);
  f("asr.epochs", c.asr.epochs);
  f("asr.batch_size", c.asr.batch_size);
  f("asr.warmup", c.asr.warmup);
  f("asr.lr_coeff", c.asr.lr_coeff);
  f("asr.ctc_weight", c.asr.ctc_weight);
  f("asr.label_smoothing", c.asr.label_smoothing);
  f("asr.spec_augment", c.asr.spec_augment);
  f("asr.time_masks", c.asr.time_masks);
  f("asr.time_width", c.asr.time_width);
  f("asr.freq_masks", c.asr.freq_masks);
  f("asr.freq_width", c.asr.freq_width);
  f("asr.average_best", c.asr.average_best);
  f("nlu.dim", c.nlu.dim);
  f("nlu.heads", c.nlu.heads);
  f("nlu.ffn_dim", c.nlu.ffn_dim);
  f("nlu.layers", c.nlu.layers);
  f("nlu.mask_prob", c.nlu.mask_prob);
  f("nlu.mlm_steps", c.nlu.mlm_steps);
  f("nlu.mlm_batch_size", c.nlu.mlm_batch_size);
  f("nlu.mlm_warmup", c.nlu.mlm_warmup);
  f("nlu.mlm_lr_coeff", c.nlu.mlm_lr_coeff);
  f("nlu.nli_pairs", c.nlu.nli_pairs);
  f("nlu.nli_steps", c.nlu.nli_steps);
  f("nlu.sts_pairs", c.nlu.sts_pairs);
  f("nlu.sts_steps", c.nlu.sts_steps);
  f("nlu.heldout_pairs", c.nlu.heldout_pairs);
  f("nlu.pair_batch_size", c.nlu.pair_batch_size);
  f("nlu.pair_warmup", c.nlu.pair_warmup);
  f("nlu.pair_lr_coeff", c.nlu.pair_lr_coeff);
  f("slu.objective", c.slu.objective);
  f("slu.k", c.slu.k);
  f("slu.m", c.slu.m);
  f("slu.epochs", c.slu.epochs);
  f("slu.batch_size", c.slu.batch_size);
  f("slu.warmup", c.slu.warmup);
  f("slu.lr_coeff", c.slu.lr_coeff);
  f("slu.ablation_k", c.slu.ablation_k);
  f("slu.ablation_m", c.slu.ablation_m);
  f("eval.classifier_lrs", c.eval.classifier_lrs);
  f("eval.classifier_steps", c.eval.classifier_steps);
  f("eval.fewshot_n", c.eval.fewshot_n);
  f("eval.fewshot_steps", c.eval.fewshot_steps);
  f("eval.fewshot_lr", c.eval.fewshot_lr);
  f("eval.fewshot_encoder_layers", c.eval.fewshot_encoder_layers);
  f("eval.bucket_width", c.eval.bucket_width);
}

[[noreturn]] void bad_value(const std::string& key, const char* what, const YAML::Node& n) {
  std::string got = n.IsScalar() ? "'" + n.Scalar() + "'"
                    : n.IsSequence() ? std::string("a sequence")
                    : n.IsMap()      ? std::string("a mapping")
                                     : std::string("nothing");
  throw ConfigError("config key '" + key + "': expected " + what + ", got " + got);
}

bool all_digits(const std::string& s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
}

void parse(const YAML::Node& n, const std::string& key, unsigned long& out) {
  if (!n.IsScalar() || !all_digits(n.Scalar())) bad_value(key, "a non-negative integer", n);
  auto [p, ec] = std::from_chars(n.Scalar().data(), n.Scalar().data() + n.Scalar().size(), out);
  if (ec != std::errc()) bad_value(key, "a non-negative integer in range", n);
  (void)p;
}

void parse(const YAML::Node& n, const std::string& key, int& out) {
  if (!n.IsScalar()) bad_value(key, "an integer", n);
  const std::string& s = n.Scalar();
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size()) bad_value(key, "an integer", n);
}

void parse(const YAML::Node& n, const std::string& key, double& out) {
  if (!n.IsScalar()) bad_value(key, "a number", n);
  const std::string& s = n.Scalar();
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(out))
    bad_value(key, "a finite number", n);
}

void parse(const YAML::Node& n, const std::string& key, bool& out) {
  if (!n.IsScalar()) bad_value(key, "a boolean", n);
  try {
    out = n.as<bool>();
  } catch (const YAML::Exception&) {
    bad_value(key, "a boolean", n);
  }
}

void parse(const YAML::Node& n, const std::string& key, std::string& out) {
  if (!n.IsScalar()) bad_value(key, "a string", n);
  out = n.Scalar();
}

template <class T>
void parse(const YAML::Node& n, const std::string& key, std::vector<T>& out) {
  if (!n.IsSequence()) bad_value(key, "a sequence", n);
  std::vector<T> v(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) parse(n[i], key + "[" + std::to_string(i) + "]", v[i]);
  out = std::move(v);
}

const std::set<std::string>& key_set() {
  static const std::set<std::string> keys = [] {
    auto v = config_keys();
    return std::set<std::string>(v.begin(), v.end());
  }();
  return keys;
}

bool is_section(const std::string& key) {
  const auto& keys = key_set();
  auto it = keys.lower_bound(key + ".");
  return it != keys.end() && it->rfind(key + ".", 0) == 0;
}

void assign(ExperimentConfig& cfg, const std::string& key, const YAML::Node& value) {
  if (!key_set().count(key)) {
    if (is_section(key)) throw ConfigError("config key '" + key + "' is a section, not a value");
    throw ConfigError("unknown config key '" + key + "'");
  }
  visit(cfg, [&](const char* name, auto& field) {
    if (key == name) parse(value, key, field);
  });
}

void flatten(const YAML::Node& n, const std::string& prefix,
             std::vector<std::pair<std::string, YAML::Node>>& out) {
  for (const auto& kv : n) {
    if (!kv.first.IsScalar()) throw ConfigError("config keys must be plain strings");
    const std::string key = prefix.empty() ? kv.first.Scalar() : prefix + "." + kv.first.Scalar();
    if (kv.second.IsMap()) {
      if (!is_section(key))
        throw ConfigError(key_set().count(key) ? "config key '" + key + "' expects a value, got a mapping"
                                               : "unknown config key '" + key + "'");
      flatten(kv.second, key, out);
    } else if (kv.second.IsNull() && is_section(key)) {
      continue;  // empty section
    } else {
      out.emplace_back(key, kv.second);
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  std::string s(buf, p);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

void emit(YAML::Emitter& e, unsigned long v) { e << std::to_string(v); }
void emit(YAML::Emitter& e, int v) { e << std::to_string(v); }
void emit(YAML::Emitter& e, double v) { e << format_double(v); }
void emit(YAML::Emitter& e, bool v) { e << (v ? "true" : "false"); }
void emit(YAML::Emitter& e, const std::string& v) { e << YAML::DoubleQuoted << v; }
template <class T>
void emit(YAML::Emitter& e, const std::vector<T>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : v) emit(e, x);
  e << YAML::EndSeq;
}

[[noreturn]] void invalid(const std::string& key, const std::string& why) {
  throw ConfigError("config key '" + key + "': " + why);
}

void check_positive(const std::string& key, std::size_t v) {
  if (v == 0) invalid(key, "must be positive");
}

}  // namespace

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  ExperimentConfig cfg;
  visit(cfg, [&](const char* name, auto&) { keys.emplace_back(name); });
  return keys;
}

void apply_yaml(ExperimentConfig& cfg, const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(origin + ": invalid YAML: " + e.what());
  }
  if (root.IsNull()) return;
  if (!root.IsMap()) throw ConfigError(origin + ": top level must be a mapping");
  std::vector<std::pair<std::string, YAML::Node>> flat;
  try {
    flatten(root, "", flat);
    for (const auto& [key, value] : flat) assign(cfg, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg;
  apply_yaml(cfg, ss.str(), path);
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ConfigError("override for '" + key + "': invalid YAML value: " + e.what());
  }
  assign(cfg, key, value);
}

void validate(const ExperimentConfig& c) {
  const auto& d = c.data;
  if (d.classes < 2 || d.classes > synth::kMaxClasses)
    invalid("data.classes", "must lie in [2, " + std::to_string(synth::kMaxClasses) + "]");
  check_positive("data.train_size", d.train_size);
  check_positive("data.valid_size", d.valid_size);
  check_positive("data.test_size", d.test_size);
  check_positive("data.frame_dim", d.frame_dim);
  check_positive("data.frames_min", d.frames_min);
  if (d.frames_max < d.frames_min) invalid("data.frames_max", "must be >= data.frames_min");
  if (d.noise_sigma < 0) invalid("data.noise_sigma", "must be non-negative");
  if (d.noisy_sigma < 0) invalid("data.noisy_sigma", "must be non-negative");
  if (d.asr_template_sentences + d.asr_bigram_texts == 0)
    invalid("data.asr_template_sentences", "the ASR corpus would be empty");
  check_positive("data.asr_valid_size", d.asr_valid_size);
  if (d.nlu_template_sentences + d.nlu_bigram_texts == 0)
    invalid("data.nlu_template_sentences", "the NLU corpus would be empty");

  auto check_stack = [](const std::string& s, std::size_t dim, std::size_t heads,
                        std::size_t ffn, std::size_t layers) {
    check_positive(s + ".dim", dim);
    check_positive(s + ".heads", heads);
    if (dim % heads != 0) invalid(s + ".heads", "must divide " + s + ".dim");
    check_positive(s + ".ffn_dim", ffn);
    check_positive(s + ".layers", layers);
  };
  const auto& a = c.asr;
  check_stack("asr", a.dim, a.heads, a.ffn_dim, a.layers);
  check_positive("asr.decoder_layers", a.decoder_layers);
  check_positive("asr.batch_size", a.batch_size);
  if (a.lr_coeff < 0) invalid("asr.lr_coeff", "must be non-negative");
  if (a.ctc_weight < 0 || a.ctc_weight > 1) invalid("asr.ctc_weight", "must lie in [0, 1]");
  if (a.label_smoothing < 0 || a.label_smoothing >= 1)
    invalid("asr.label_smoothing", "must lie in [0, 1)");
  check_positive("asr.average_best", a.average_best);

  const auto& n = c.nlu;
  check_stack("nlu", n.dim, n.heads, n.ffn_dim, n.layers);
  if (n.mask_prob <= 0 || n.mask_prob >= 1) invalid("nlu.mask_prob", "must lie in (0, 1)");
  check_positive("nlu.mlm_batch_size", n.mlm_batch_size);
  if (n.mlm_lr_coeff < 0) invalid("nlu.mlm_lr_coeff", "must be non-negative");
  if (n.nli_steps > 0 && n.nli_pairs == 0) invalid("nlu.nli_pairs", "must be positive");
  if (n.sts_steps > 0 && n.sts_pairs == 0) invalid("nlu.sts_pairs", "must be positive");
  check_positive("nlu.heldout_pairs", n.heldout_pairs);
  check_positive("nlu.pair_batch_size", n.pair_batch_size);
  if (n.pair_lr_coeff < 0) invalid("nlu.pair_lr_coeff", "must be non-negative");

  const auto& s = c.slu;
  try {
    slu::parse_distance(s.objective);
  } catch (const ContractViolation& e) {
    invalid("slu.objective", e.what());
  }
  if (s.k > a.layers) invalid("slu.k", "exceeds asr.layers");
  if (s.m > n.layers) invalid("slu.m", "exceeds nlu.layers");
  check_positive("slu.batch_size", s.batch_size);
  if (s.lr_coeff < 0) invalid("slu.lr_coeff", "must be non-negative");
  if (s.ablation_k.empty()) invalid("slu.ablation_k", "must not be empty");
  if (s.ablation_m.empty()) invalid("slu.ablation_m", "must not be empty");
  for (auto k : s.ablation_k)
    if (k > a.layers) invalid("slu.ablation_k", "entry exceeds asr.layers");
  for (auto m : s.ablation_m)
    if (m > n.layers) invalid("slu.ablation_m", "entry exceeds nlu.layers");

  const auto& e = c.eval;
  if (e.classifier_lrs.empty()) invalid("eval.classifier_lrs", "must not be empty");
  for (double lr : e.classifier_lrs)
    if (lr <= 0) invalid("eval.classifier_lrs", "entries must be positive");
  if (e.classifier_steps.empty()) invalid("eval.classifier_steps", "must not be empty");
  if (e.fewshot_n.empty()) invalid("eval.fewshot_n", "must not be empty");
  for (auto fn : e.fewshot_n)
    if (fn * static_cast<std::size_t>(d.classes) > d.train_size)
      invalid("eval.fewshot_n", "needs more than data.train_size utterances");
  if (e.fewshot_lr <= 0) invalid("eval.fewshot_lr", "must be positive");
  if (e.fewshot_encoder_layers > a.layers)
    invalid("eval.fewshot_encoder_layers", "exceeds asr.layers");
  if (e.bucket_width <= 0 || e.bucket_width > 100)
    invalid("eval.bucket_width", "must lie in (0, 100]");
}

std::string to_yaml(const ExperimentConfig& cfg) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  std::string section;
  visit(cfg, [&](const char* name, const auto& field) {
    const std::string key(name);
    const auto dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) e << YAML::EndMap;
      if (!sec.empty()) e << YAML::Key << sec << YAML::Value << YAML::BeginMap;
      section = sec;
    }
    e << YAML::Key << (dot == std::string::npos ? key : key.substr(dot + 1)) << YAML::Value;
    emit(e, field);
  });
  if (!section.empty()) e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string fingerprint(const ExperimentConfig& cfg) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_yaml(cfg)) h = (h ^ ch) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t stream_seed(const ExperimentConfig& cfg, const std::string& tag) {
  return derive_seed(cfg.seed, tag);
}

synth::AcousticSpec acoustic_spec(const ExperimentConfig& cfg, double noise_sigma) {
  const auto& d = cfg.data;
  return synth::AcousticSpec::make(d.frame_dim, d.frames_min, d.frames_max, noise_sigma,
                                   d.prototype_seed);
}

asr::AsrConfig asr_model_config(const ExperimentConfig& cfg) {
  const auto& a = cfg.asr;
  return {cfg.data.frame_dim, {a.dim, a.heads, a.ffn_dim, a.layers}, a.decoder_layers};
}

asr::AsrTrainConfig asr_train_config(const ExperimentConfig& cfg) {
  const auto& a = cfg.asr;
  asr::AsrTrainConfig t;
  t.epochs = a.epochs;
  t.batch_size = a.batch_size;
  t.schedule = {a.warmup, a.lr_coeff, a.dim};
  t.loss = {a.ctc_weight, a.label_smoothing};
  t.spec_augment = a.spec_augment;
  t.augment = {a.time_masks, a.time_width, a.freq_masks, a.freq_width};
  t.average_best = a.average_best;
  t.seed = stream_seed(cfg, "asr.train");
  return t;
}

nlu::NluConfig nlu_model_config(const ExperimentConfig& cfg) {
  const auto& n = cfg.nlu;
  nlu::NluConfig c;
  c.encoder = {n.dim, n.heads, n.ffn_dim, n.layers};
  return c;
}

nlu::MlmConfig mlm_config(const ExperimentConfig& cfg) {
  const auto& n = cfg.nlu;
  nlu::MlmConfig m;
  m.mask_prob = n.mask_prob;
  m.steps = n.mlm_steps;
  m.batch_size = n.mlm_batch_size;
  m.schedule = {n.mlm_warmup, n.mlm_lr_coeff, n.dim};
  m.seed = stream_seed(cfg, "nlu.mlm");
  return m;
}

nlu::PairTrainConfig pair_config(const ExperimentConfig& cfg, std::size_t steps,
                                 const std::string& tag) {
  const auto& n = cfg.nlu;
  nlu::PairTrainConfig p;
  p.steps = steps;
  p.batch_size = n.pair_batch_size;
  p.schedule = {n.pair_warmup, n.pair_lr_coeff, n.dim};
  p.seed = stream_seed(cfg, tag);
  return p;
}

slu::StudentConfig student_config(const ExperimentConfig& cfg) {
  return {cfg.data.frame_dim, asr_model_config(cfg).encoder, nlu_model_config(cfg).encoder};
}

slu::DistillConfig distill_config(const ExperimentConfig& cfg) {
  const auto& s = cfg.slu;
  slu::DistillConfig d;
  d.objective = slu::parse_distance(s.objective);
  d.asr_layers_to_tune = s.k;
  d.nlu_layers_to_tune = s.m;
  d.schedule = {s.warmup, s.lr_coeff, cfg.nlu.dim};
  d.epochs = s.epochs;
  d.batch_size = s.batch_size;
  d.seed = stream_seed(cfg, "slu.distill");
  return d;
}

eval::FewshotConfig fewshot_config(const ExperimentConfig& cfg) {
  eval::FewshotConfig f;
  f.steps = cfg.eval.fewshot_steps;
  f.lr = cfg.eval.fewshot_lr;
  f.encoder_layers = cfg.eval.fewshot_encoder_layers;
  f.seed = stream_seed(cfg, "eval.fewshot");
  return f;
}

}  // namespace xmts::harness
