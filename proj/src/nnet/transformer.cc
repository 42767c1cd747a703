// xmts/src/nnet/transformer.cc

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

#include "xmts/nnet/transformer.h"

#include "xmts/diff/errors.h"

namespace xmts::nnet {

void TransformerConfig::validate() const {
  require(dim > 0 && heads > 0 && ffn_dim > 0, "transformer: dims must be positive");
  require(dim % heads == 0, "transformer: dim " + std::to_string(dim) +
                                " not divisible by heads " + std::to_string(heads));
}

std::size_t transformer_layer_param_count(const TransformerConfig& cfg) {
  const std::size_t d = cfg.dim, f = cfg.ffn_dim;
  return 4 * d * d + 4 * d + 2 * d * f + f + d + 4 * d;
}

TransformerStack::TransformerStack(std::string prefix, TransformerConfig cfg)
    : prefix_(std::move(prefix)), cfg_(cfg) {
  cfg_.validate();
}

std::string TransformerStack::layer_prefix(std::size_t i) const {
  return prefix_ + ".layer" + std::to_string(i);
}

void TransformerStack::init(ParamSet& ps, Rng& rng) const {
  for (std::size_t i = 0; i < cfg_.layers; ++i) {
    const std::string p = layer_prefix(i);
    init_attention(ps, p + ".attn", cfg_.dim, rng);
    init_layer_norm(ps, p + ".ln1", cfg_.dim);
    init_feed_forward(ps, p + ".ffn", cfg_.dim, cfg_.ffn_dim, rng);
    init_layer_norm(ps, p + ".ln2", cfg_.dim);
  }
}

Var TransformerStack::encode_layer(Graph& g, std::size_t layer, Var x,
                                   const ValidMask& mask) const {
  const std::string p = layer_prefix(layer);
  Var a = multi_head_attention(g, p + ".attn", x, x, cfg_.heads, mask);
  x = layer_norm(g, p + ".ln1", diff::add(x, a));
  Var f = feed_forward(g, p + ".ffn", x);
  return layer_norm(g, p + ".ln2", diff::add(x, f));
}

Var TransformerStack::encode(Graph& g, Var x, const ValidMask& mask) const {
  require(x.value().cols() == cfg_.dim, "transformer_encode: input width " +
                                            std::to_string(x.value().cols()) + " != D " +
                                            std::to_string(cfg_.dim));
  require(mask.empty() || mask.size() == x.value().rows(),
          "transformer_encode: mask length does not match sequence length");
  bool any_valid = mask.empty();
  for (auto m : mask) any_valid = any_valid || m;
  require(any_valid, "transformer_encode: empty valid region");
  for (std::size_t i = 0; i < cfg_.layers; ++i) x = encode_layer(g, i, x, mask);
  return x;
}

EncodedSequence transformer_encode(const TransformerStack& stack, const ParamSet& params,
                                   const Tensor& input, const ValidMask& mask) {
  Graph g(&params, /*grad_enabled=*/false);
  Var out = stack.encode(g, g.constant(input), mask);
  return {out.value(), mask};
}

std::vector<double> mean_pool(const EncodedSequence& enc) {
  Graph g;
  Var m = diff::mean_rows(g.constant(enc.vectors), enc.mask);
  return m.value().storage();
}

}  // namespace xmts::nnet
