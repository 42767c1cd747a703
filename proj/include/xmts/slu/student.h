// xmts/include/xmts/slu/student.h

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

#include <stdexcept>

#include "xmts/asr/model.h"
#include "xmts/nlu/model.h"

namespace xmts::slu {

using diff::Graph;
using diff::ParamSet;
using diff::Tensor;
using diff::Var;
using nlu::Embedding;

struct StudentConfig {
  std::size_t frame_dim = 8;
  nnet::TransformerConfig encoder;  // former ASR encoder
  nnet::TransformerConfig nlu;      // former NLU encoder
};

/// frontend -> ASR encoder -> bridge -> positions -> NLU layers -> mean.
/// Parameters: slu.frontend.*, slu.encoder.layer{i}.*, slu.bridge.*,
/// slu.nlu.layer{i}.*.
struct StudentModel {
  StudentConfig config;
  ParamSet params;
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Deep-copies the ASR frontend and encoder and the NLU encoder layers and adds
// a freshly initialized bridge. The ASR CTC head and decoder and the NLU
// embeddings and MLM head are left behind.
StudentModel assemble_student(const asr::AsrModel& asr, const nlu::NluModel& nlu,
                              std::uint64_t seed);

// Closed-form parameter count of an assembled student.
std::size_t student_param_count(const StudentConfig& cfg);

std::string student_encoder_layer(std::size_t i);
std::string student_nlu_layer(std::size_t i);
inline constexpr const char* kBridge = "slu.bridge";

Var student_embed_var(const StudentConfig& cfg, Graph& g, Var frames);
Embedding student_embed(const StudentModel& s, const Tensor& frames);
std::vector<Embedding> student_embed_all(const StudentModel& s, const std::vector<Tensor>& frames);

}  // namespace xmts::slu
