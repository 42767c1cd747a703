// xmts/include/xmts/diff/params.h

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
#include <map>
#include <string>
#include <vector>

#include "xmts/diff/tensor.h"

namespace xmts::diff {

struct Param {
  Tensor value;
  bool trainable = true;
};

using Gradients = std::map<std::string, Tensor>;

/// Named parameter tensors keyed by dotted path ("asr.encoder.layer0.attn.q.weight").
/// Iteration order is lexicographic by name, which is the order used for
/// checksums, serialization and gradient reduction.
class ParamSet {
 public:
  void add(const std::string& name, Tensor value, bool trainable = true);
  bool contains(const std::string& name) const { return params_.count(name) != 0; }
  const Tensor& value(const std::string& name) const;
  Tensor& mutable_value(const std::string& name);
  bool trainable(const std::string& name) const;
  void set_trainable(const std::string& name, bool trainable);
  void set_all_trainable(bool trainable);

  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  std::vector<std::string> names() const;
  // Total number of scalar entries, optionally only trainable ones.
  std::size_t scalar_count(bool trainable_only = false) const;

  // True if some parameter name is `prefix` or starts with `prefix + "."`.
  bool has_prefix(const std::string& prefix) const;

  // Copy of every entry under `from` renamed to live under `to`.
  ParamSet rename_prefix(const std::string& from, const std::string& to) const;
  void merge(const ParamSet& other);

  // FNV-1a over names and raw value bytes. Pass a predicate-free call to
  // hash everything; `frozen_only` restricts to non-trainable entries.
  std::uint64_t checksum(bool frozen_only = false) const;
  std::uint64_t checksum_of(const std::vector<std::string>& names) const;

  void quantize_f32();

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  bool operator==(const ParamSet& o) const;

 private:
  std::map<std::string, Param> params_;
};

bool name_under(const std::string& name, const std::string& prefix);

}  // namespace xmts::diff
