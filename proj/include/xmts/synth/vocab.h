// xmts/include/xmts/synth/vocab.h

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

#include <string>
#include <vector>

namespace xmts::synth {

using TokenSequence = std::vector<int>;

/// Fixed desk-scale vocabulary: 12 content tokens a..l, a text-only
/// punctuation marker, then the reserved symbols.
struct Vocab {
  static constexpr int kContent = 12;
  static constexpr int kMarker = 12;
  static constexpr int kBlank = 13;
  static constexpr int kPad = 14;
  static constexpr int kMask = 15;
  static constexpr int kCls = 16;
  static constexpr int kSos = 17;
  static constexpr int kEos = 18;
  static constexpr int kSize = 19;

  static bool is_content(int id) { return id >= 0 && id < kContent; }
  static bool is_valid(int id) { return id >= 0 && id < kSize; }
  static std::string symbol(int id);
  // Inverse of symbol(); throws ContractViolation for unknown symbols.
  static int id_of(const std::string& sym);
  static std::string join(const TokenSequence& toks);
};

}  // namespace xmts::synth
