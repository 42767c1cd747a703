// xmts/src/nlu/model.cc

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

#include "xmts/nlu/model.h"

#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"

namespace xmts::nlu {

NluModel NluModel::create(const NluConfig& cfg, std::uint64_t seed) {
  cfg.encoder.validate();
  NluModel m;
  m.config = cfg;
  Rng rng(seed);
  const std::size_t d = cfg.encoder.dim;
  Tensor embed = Tensor::matrix(Vocab::kSize, d);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (double& v : embed.storage()) v = nd(rng);
  diff::quantize_f32(embed);
  m.params.add("nlu.embed.tokens", std::move(embed));
  m.encoder_stack().init(m.params, rng);
  nnet::init_linear(m.params, "nlu.mlm_head", d, Vocab::kSize, rng);
  return m;
}

nnet::TransformerStack NluModel::encoder_stack() const {
  return nnet::TransformerStack("nlu.encoder", config.encoder);
}

TokenSequence model_input(const NluConfig& cfg, const TokenSequence& tokens) {
  TokenSequence in;
  if (cfg.prepend_cls) in.push_back(Vocab::kCls);
  in.insert(in.end(), tokens.begin(), tokens.end());
  return in;
}

Var nlu_encode(const NluConfig& cfg, Graph& g, const TokenSequence& tokens) {
  require(!tokens.empty(), "nlu: empty token sequence");
  for (int t : tokens)
    require(Vocab::is_valid(t), "nlu: unknown token id " + std::to_string(t));
  Var x = diff::gather_rows(g.param("nlu.embed.tokens"), model_input(cfg, tokens));
  if (cfg.positions) x = nnet::add_positions(g, x);
  return nnet::TransformerStack("nlu.encoder", cfg.encoder).encode(g, x);
}

Var sentence_embed_var(const NluConfig& cfg, Graph& g, const TokenSequence& tokens) {
  return diff::mean_rows(nlu_encode(cfg, g, tokens));
}

Embedding sentence_embed(const NluModel& model, const TokenSequence& tokens) {
  Graph g(&model.params, /*grad_enabled=*/false);
  return sentence_embed_var(model.config, g, tokens).value().storage();
}

std::vector<Embedding> sentence_embed_all(const NluModel& model,
                                          const std::vector<TokenSequence>& texts) {
  std::vector<Embedding> out(texts.size());
  kernels::parallel_for(texts.size(), [&](std::size_t i) { out[i] = sentence_embed(model, texts[i]); });
  return out;
}

}  // namespace xmts::nlu
