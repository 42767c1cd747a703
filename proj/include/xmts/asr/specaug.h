// xmts/include/xmts/asr/specaug.h

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

#include <vector>

#include "xmts/diff/random.h"
#include "xmts/diff/tensor.h"

namespace xmts::asr {

struct SpecAugmentPolicy {
  std::size_t num_time_masks = 2;
  std::size_t max_time_width = 4;
  std::size_t num_freq_masks = 1;
  std::size_t max_freq_width = 2;
};

struct Band {
  std::size_t start = 0;
  std::size_t width = 0;
};

struct Augmented {
  diff::Tensor frames;
  std::vector<Band> time_bands;
  std::vector<Band> freq_bands;
};

// Zeroes random time and feature bands of a copy of `frames`. Widths are
// drawn uniformly from [0, max] and clamped to the matrix extent.
Augmented spec_augment(const diff::Tensor& frames, const SpecAugmentPolicy& policy, Rng& rng);

}  // namespace xmts::asr
