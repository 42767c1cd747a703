// xmts/src/asr/model.cc

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

#include "xmts/asr/model.h"

#include "xmts/diff/errors.h"

namespace xmts::asr {

namespace {

const char* kFrontend = "asr.frontend";
const char* kDecoder = "asr.decoder";

std::string dec_layer(std::size_t i) { return std::string(kDecoder) + ".layer" + std::to_string(i); }

}  // namespace

void init_frontend(ParamSet& ps, const std::string& prefix, std::size_t frame_dim,
                   std::size_t dim, Rng& rng) {
  nnet::init_linear(ps, prefix + ".stage0", 2 * frame_dim, dim, rng);
  nnet::init_linear(ps, prefix + ".stage1", 2 * dim, dim, rng);
}

Var apply_frontend(Graph& g, const std::string& prefix, Var frames) {
  Var x = diff::gelu(nnet::linear(g, prefix + ".stage0", diff::stack_rows(frames, 2)));
  return diff::gelu(nnet::linear(g, prefix + ".stage1", diff::stack_rows(x, 2)));
}

std::size_t subsampled_length(std::size_t frames) { return ((frames + 1) / 2 + 1) / 2; }

AsrModel AsrModel::create(const AsrConfig& cfg, std::uint64_t seed) {
  cfg.encoder.validate();
  AsrModel m;
  m.config = cfg;
  Rng rng(seed);
  const std::size_t d = cfg.encoder.dim;
  init_frontend(m.params, kFrontend, cfg.frame_dim, d, rng);
  m.encoder_stack().init(m.params, rng);
  nnet::init_linear(m.params, "asr.ctc_head", d, Vocab::kSize, rng);

  Tensor embed = Tensor::matrix(Vocab::kSize, d);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double& v : embed.storage()) v = nd(rng);
  diff::quantize_f32(embed);
  m.params.add(std::string(kDecoder) + ".embed", std::move(embed));
  for (std::size_t i = 0; i < cfg.decoder_layers; ++i) {
    const std::string p = dec_layer(i);
    nnet::init_attention(m.params, p + ".self_attn", d, rng);
    nnet::init_layer_norm(m.params, p + ".ln1", d);
    nnet::init_attention(m.params, p + ".cross_attn", d, rng);
    nnet::init_layer_norm(m.params, p + ".ln2", d);
    nnet::init_feed_forward(m.params, p + ".ffn", d, cfg.encoder.ffn_dim, rng);
    nnet::init_layer_norm(m.params, p + ".ln3", d);
  }
  nnet::init_linear(m.params, std::string(kDecoder) + ".out", d, Vocab::kSize, rng);
  return m;
}

nnet::TransformerStack AsrModel::encoder_stack() const {
  return nnet::TransformerStack("asr.encoder", config.encoder);
}

Var asr_encode(const AsrConfig& cfg, Graph& g, Var frames) {
  require(frames.value().cols() == cfg.frame_dim,
          "asr: frame width " + std::to_string(frames.value().cols()) + " != " +
              std::to_string(cfg.frame_dim));
  Var x = nnet::add_positions(g, apply_frontend(g, kFrontend, frames));
  return nnet::TransformerStack("asr.encoder", cfg.encoder).encode(g, x);
}

Var ctc_logits(Graph& g, Var encoded) { return nnet::linear(g, "asr.ctc_head", encoded); }

Var decoder_logits(const AsrConfig& cfg, Graph& g, Var encoded, const TokenSequence& inputs) {
  require(!inputs.empty(), "decoder: empty input sequence");
  for (int t : inputs) require(Vocab::is_valid(t), "decoder: unknown token id");
  const std::size_t heads = cfg.encoder.heads;
  Var x = diff::gather_rows(g.param(std::string(kDecoder) + ".embed"), inputs);
  x = nnet::add_positions(g, x);
  for (std::size_t i = 0; i < cfg.decoder_layers; ++i) {
    const std::string p = dec_layer(i);
    Var a = nnet::multi_head_attention(g, p + ".self_attn", x, x, heads, {}, /*causal=*/true);
    x = nnet::layer_norm(g, p + ".ln1", diff::add(x, a));
    Var c = nnet::multi_head_attention(g, p + ".cross_attn", x, encoded, heads);
    x = nnet::layer_norm(g, p + ".ln2", diff::add(x, c));
    Var f = nnet::feed_forward(g, p + ".ffn", x);
    x = nnet::layer_norm(g, p + ".ln3", diff::add(x, f));
  }
  return nnet::linear(g, std::string(kDecoder) + ".out", x);
}

}  // namespace xmts::asr
