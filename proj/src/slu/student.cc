// xmts/src/slu/student.cc

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

#include "xmts/slu/student.h"

#include "xmts/diff/errors.h"
#include "xmts/kernels/parallel.h"

namespace xmts::slu {

namespace {

void require_prefix(const ParamSet& ps, const std::string& prefix) {
  if (!ps.has_prefix(prefix))
    throw AssemblyError("assemble_student: checkpoint has no parameters under '" + prefix + "'");
}

}  // namespace

std::string student_encoder_layer(std::size_t i) { return "slu.encoder.layer" + std::to_string(i); }
std::string student_nlu_layer(std::size_t i) { return "slu.nlu.layer" + std::to_string(i); }

StudentModel assemble_student(const asr::AsrModel& asr, const nlu::NluModel& nlu,
                              std::uint64_t seed) {
  require_prefix(asr.params, "asr.frontend");
  for (std::size_t i = 0; i < asr.config.encoder.layers; ++i)
    require_prefix(asr.params, "asr.encoder.layer" + std::to_string(i));
  for (std::size_t i = 0; i < nlu.config.encoder.layers; ++i)
    require_prefix(nlu.params, "nlu.encoder.layer" + std::to_string(i));

  StudentModel s;
  s.config = {asr.config.frame_dim, asr.config.encoder, nlu.config.encoder};
  s.params.merge(asr.params.rename_prefix("asr.frontend", "slu.frontend"));
  s.params.merge(asr.params.rename_prefix("asr.encoder", "slu.encoder"));
  s.params.merge(nlu.params.rename_prefix("nlu.encoder", "slu.nlu"));
  Rng rng(derive_seed(seed, "bridge"));
  nnet::init_linear(s.params, kBridge, s.config.encoder.dim, s.config.nlu.dim, rng);
  s.params.set_all_trainable(true);
  return s;
}

std::size_t student_param_count(const StudentConfig& cfg) {
  const std::size_t da = cfg.encoder.dim, dn = cfg.nlu.dim;
  const std::size_t frontend = (2 * cfg.frame_dim * da + da) + (2 * da * da + da);
  return frontend + nnet::transformer_param_count(cfg.encoder) + da * dn + dn +
         nnet::transformer_param_count(cfg.nlu);
}

Var student_embed_var(const StudentConfig& cfg, Graph& g, Var frames) {
  require(frames.value().rows() > 0, "student_embed: empty input");
  require(frames.value().cols() == cfg.frame_dim,
          "student_embed: frame width " + std::to_string(frames.value().cols()) +
              " does not match frontend width " + std::to_string(cfg.frame_dim));
  Var x = nnet::add_positions(g, asr::apply_frontend(g, "slu.frontend", frames));
  x = nnet::TransformerStack("slu.encoder", cfg.encoder).encode(g, x);
  x = nnet::add_positions(g, nnet::linear(g, kBridge, x));
  x = nnet::TransformerStack("slu.nlu", cfg.nlu).encode(g, x);
  return diff::mean_rows(x);
}

Embedding student_embed(const StudentModel& s, const Tensor& frames) {
  Graph g(&s.params, /*grad_enabled=*/false);
  return student_embed_var(s.config, g, g.constant(frames)).value().storage();
}

std::vector<Embedding> student_embed_all(const StudentModel& s, const std::vector<Tensor>& frames) {
  std::vector<Embedding> out(frames.size());
  kernels::parallel_for(frames.size(), [&](std::size_t i) { out[i] = student_embed(s, frames[i]); });
  return out;
}

}  // namespace xmts::slu
