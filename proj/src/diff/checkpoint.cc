// xmts/src/diff/checkpoint.cc

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

#include "xmts/diff/checkpoint.h"

#include <cstring>
#include <fstream>

#include "xmts/diff/binio.h"
#include "xmts/diff/errors.h"

namespace xmts::diff {

void save_checkpoint(const std::string& path, const ModelCheckpoint& ckpt) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw LoadError(LoadError::Kind::kIo, "cannot open '" + path + "' for writing");
  BinaryWriter w(os);
  w.bytes(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& [name, p] : ckpt.params) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(p.value.rank()));
    for (std::size_t e : p.value.shape()) w.u64(e);
    for (double v : p.value.data()) w.f32(static_cast<float>(v));
  }
  w.u64(ckpt.step);
  w.f64(ckpt.valid_loss);
  w.u64(ckpt.source_count);
  if (!w.ok()) throw LoadError(LoadError::Kind::kIo, "write failed for '" + path + "'");
}

ModelCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw LoadError(LoadError::Kind::kIo, "cannot open checkpoint '" + path + "'");
  BinaryReader r(is, path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw LoadError(LoadError::Kind::kMagicMismatch, path + ": not a checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw LoadError(LoadError::Kind::kVersionMismatch,
                    path + ": unsupported checkpoint version " + std::to_string(version));
  ModelCheckpoint ckpt;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw LoadError(LoadError::Kind::kMalformed, path + ": bad rank for " + name);
    Shape shape(rank);
    std::size_t n = 1;
    for (auto& e : shape) {
      e = r.u64();
      if (e == 0 || e > (1u << 28)) throw LoadError(LoadError::Kind::kMalformed, path + ": bad extent for " + name);
      n *= e;
    }
    std::vector<double> data(n);
    for (double& v : data) v = static_cast<double>(r.f32());
    if (ckpt.params.contains(name))
      throw LoadError(LoadError::Kind::kDuplicate, path + ": duplicate tensor '" + name + "'");
    ckpt.params.add(name, Tensor(std::move(shape), std::move(data)));
  }
  ckpt.step = r.u64();
  ckpt.valid_loss = r.f64();
  ckpt.source_count = r.u64();
  return ckpt;
}

}  // namespace xmts::diff
