// xmts/src/nnet/layers.cc

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

#include "xmts/nnet/layers.h"

#include <cmath>

#include "xmts/diff/errors.h"

namespace xmts::nnet {

void init_linear(ParamSet& ps, const std::string& prefix, std::size_t in, std::size_t out,
                 Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> ud(-bound, bound);
  Tensor w = Tensor::matrix(in, out);
  for (double& v : w.storage()) v = ud(rng);
  diff::quantize_f32(w);
  ps.add(prefix + ".weight", std::move(w));
  ps.add(prefix + ".bias", Tensor(diff::Shape{out}, 0.0));
}

Var linear(Graph& g, const std::string& prefix, Var x) {
  return diff::add_row(diff::matmul(x, g.param(prefix + ".weight")), g.param(prefix + ".bias"));
}

void init_layer_norm(ParamSet& ps, const std::string& prefix, std::size_t dim) {
  ps.add(prefix + ".gamma", Tensor(diff::Shape{dim}, 1.0));
  ps.add(prefix + ".beta", Tensor(diff::Shape{dim}, 0.0));
}

Var layer_norm(Graph& g, const std::string& prefix, Var x) {
  return diff::layer_norm_rows(x, g.param(prefix + ".gamma"), g.param(prefix + ".beta"));
}

void init_attention(ParamSet& ps, const std::string& prefix, std::size_t dim, Rng& rng) {
  for (const char* p : {"q", "k", "v", "out"}) init_linear(ps, prefix + "." + p, dim, dim, rng);
}

Var multi_head_attention(Graph& g, const std::string& prefix, Var query, Var memory,
                         std::size_t heads, const ValidMask& key_valid, bool causal) {
  const std::size_t dim = query.value().cols();
  require(heads > 0 && dim % heads == 0,
          "attention: model dim " + std::to_string(dim) + " not divisible by " +
              std::to_string(heads) + " heads");
  const std::size_t head_dim = dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  Var q = linear(g, prefix + ".q", query);
  Var k = linear(g, prefix + ".k", memory);
  Var v = linear(g, prefix + ".v", memory);
  std::vector<Var> outs;
  outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = diff::slice_cols(q, h * head_dim, head_dim);
    Var kh = diff::slice_cols(k, h * head_dim, head_dim);
    Var vh = diff::slice_cols(v, h * head_dim, head_dim);
    Var scores = diff::scale(diff::matmul_nt(qh, kh), inv_sqrt);
    outs.push_back(diff::matmul(diff::softmax_rows(scores, key_valid, causal), vh));
  }
  Var joined = heads == 1 ? outs[0] : diff::concat_cols(outs);
  return linear(g, prefix + ".out", joined);
}

void init_feed_forward(ParamSet& ps, const std::string& prefix, std::size_t dim,
                       std::size_t inner, Rng& rng) {
  init_linear(ps, prefix + ".in", dim, inner, rng);
  init_linear(ps, prefix + ".out", inner, dim, rng);
}

Var feed_forward(Graph& g, const std::string& prefix, Var x) {
  return linear(g, prefix + ".out", diff::gelu(linear(g, prefix + ".in", x)));
}

Tensor positional_encoding(std::size_t length, std::size_t dim) {
  Tensor pe = Tensor::matrix(length, dim);
  for (std::size_t pos = 0; pos < length; ++pos) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double i2 = static_cast<double>(c - c % 2);
      const double angle =
          static_cast<double>(pos) / std::pow(10000.0, i2 / static_cast<double>(dim));
      pe(pos, c) = c % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Var add_positions(Graph& g, Var x) {
  return diff::add(x, g.constant(positional_encoding(x.value().rows(), x.value().cols())));
}

}  // namespace xmts::nnet
