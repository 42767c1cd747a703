// xmts/src/asr/specaug.cc

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

#include "xmts/asr/specaug.h"

#include <algorithm>

namespace xmts::asr {

namespace {

Band draw_band(std::size_t extent, std::size_t max_width, Rng& rng) {
  Band b;
  b.width = std::min(std::uniform_int_distribution<std::size_t>(0, max_width)(rng), extent);
  b.start = std::uniform_int_distribution<std::size_t>(0, extent - b.width)(rng);
  return b;
}

}  // namespace

Augmented spec_augment(const diff::Tensor& frames, const SpecAugmentPolicy& policy, Rng& rng) {
  Augmented out{frames, {}, {}};
  const std::size_t T = frames.rows(), F = frames.cols();
  for (std::size_t i = 0; i < policy.num_time_masks; ++i) {
    Band b = draw_band(T, policy.max_time_width, rng);
    for (std::size_t t = b.start; t < b.start + b.width; ++t)
      for (std::size_t f = 0; f < F; ++f) out.frames(t, f) = 0.0;
    out.time_bands.push_back(b);
  }
  for (std::size_t i = 0; i < policy.num_freq_masks; ++i) {
    Band b = draw_band(F, policy.max_freq_width, rng);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t f = b.start; f < b.start + b.width; ++f) out.frames(t, f) = 0.0;
    out.freq_bands.push_back(b);
  }
  return out;
}

}  // namespace xmts::asr
