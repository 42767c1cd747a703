// xmts/src/synth/vocab.cc

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

#include "xmts/synth/vocab.h"

#include <array>

#include "xmts/diff/errors.h"

namespace xmts::synth {

namespace {
const std::array<const char*, Vocab::kSize> kSymbols = {
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", ".",
    "<blank>", "<pad>", "<mask>", "<cls>", "<sos>", "<eos>"};
}

std::string Vocab::symbol(int id) {
  require(is_valid(id), "vocab: token id " + std::to_string(id) + " out of range");
  return kSymbols[static_cast<std::size_t>(id)];
}

int Vocab::id_of(const std::string& sym) {
  for (int i = 0; i < kSize; ++i)
    if (sym == kSymbols[static_cast<std::size_t>(i)]) return i;
  throw ContractViolation("vocab: unknown symbol '" + sym + "'");
}

std::string Vocab::join(const TokenSequence& toks) {
  std::string out;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += symbol(toks[i]);
  }
  return out;
}

}  // namespace xmts::synth
