// xmts/include/xmts/diff/checkpoint.h

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

#include <cstdint>
#include <string>

#include "xmts/diff/params.h"

namespace xmts::diff {

/// Unit of persistence, averaging and selection.
struct ModelCheckpoint {
  ParamSet params;
  std::uint64_t step = 0;
  double valid_loss = 0.0;
  // Number of checkpoints averaged into this one (1 for a plain snapshot).
  std::uint64_t source_count = 1;
};

inline constexpr char kCheckpointMagic[4] = {'X', 'M', 'T', 'S'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout: "XMTS", u32 version, u32 tensor count; per tensor: u32 name length,
// UTF-8 name, u32 rank, u64 extents, float32 payload; then u64 step,
// f64 validation loss, u64 source count. All little-endian.
void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt);
ModelCheckpoint load_checkpoint(const std::string& path);

}  // namespace xmts::diff
