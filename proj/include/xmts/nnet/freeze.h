// xmts/include/xmts/nnet/freeze.h

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

#include "xmts/diff/params.h"

namespace xmts::nnet {

// Parameters under any listed prefix are trainable; everything else is frozen.
struct FreezeMask {
  std::vector<std::string> trainable_prefixes;

  bool selects(const std::string& name) const {
    for (const auto& p : trainable_prefixes)
      if (diff::name_under(name, p)) return true;
    return false;
  }

  void apply(diff::ParamSet& ps) const {
    for (const auto& name : ps.names()) ps.set_trainable(name, selects(name));
  }
};

}  // namespace xmts::nnet
