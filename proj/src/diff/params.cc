// xmts/src/diff/params.cc

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

#include "xmts/diff/params.h"

#include <cstring>

#include "xmts/diff/errors.h"

namespace xmts::diff {

namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv(std::uint64_t& h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

void hash_entry(std::uint64_t& h, const std::string& name, const Tensor& t) {
  fnv(h, name.data(), name.size());
  fnv(h, t.data().data(), t.size() * sizeof(double));
}

}  // namespace

bool name_under(const std::string& name, const std::string& prefix) {
  if (name.size() < prefix.size() || name.compare(0, prefix.size(), prefix) != 0) return false;
  return name.size() == prefix.size() || name[prefix.size()] == '.';
}

void ParamSet::add(const std::string& name, Tensor value, bool trainable) {
  require(!name.empty(), "parameter name must be non-empty");
  require(!contains(name), "duplicate parameter name '" + name + "'");
  params_.emplace(name, Param{std::move(value), trainable});
}

const Tensor& ParamSet::value(const std::string& name) const {
  auto it = params_.find(name);
  require(it != params_.end(), "unknown parameter '" + name + "'");
  return it->second.value;
}

Tensor& ParamSet::mutable_value(const std::string& name) {
  auto it = params_.find(name);
  require(it != params_.end(), "unknown parameter '" + name + "'");
  return it->second.value;
}

bool ParamSet::trainable(const std::string& name) const {
  auto it = params_.find(name);
  require(it != params_.end(), "unknown parameter '" + name + "'");
  return it->second.trainable;
}

void ParamSet::set_trainable(const std::string& name, bool trainable) {
  auto it = params_.find(name);
  require(it != params_.end(), "unknown parameter '" + name + "'");
  it->second.trainable = trainable;
}

void ParamSet::set_all_trainable(bool trainable) {
  for (auto& [_, p] : params_) p.trainable = trainable;
}

std::vector<std::string> ParamSet::names() const {
  std::vector<std::string> out;
  out.reserve(params_.size());
  for (const auto& [name, _] : params_) out.push_back(name);
  return out;
}

std::size_t ParamSet::scalar_count(bool trainable_only) const {
  std::size_t n = 0;
  for (const auto& [_, p] : params_)
    if (!trainable_only || p.trainable) n += p.value.size();
  return n;
}

bool ParamSet::has_prefix(const std::string& prefix) const {
  auto it = params_.lower_bound(prefix);
  for (; it != params_.end(); ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) break;
    if (name_under(it->first, prefix)) return true;
  }
  return false;
}

ParamSet ParamSet::rename_prefix(const std::string& from, const std::string& to) const {
  ParamSet out;
  for (const auto& [name, p] : params_) {
    if (!name_under(name, from)) continue;
    out.add(to + name.substr(from.size()), p.value, p.trainable);
  }
  return out;
}

void ParamSet::merge(const ParamSet& other) {
  for (const auto& [name, p] : other.params_) add(name, p.value, p.trainable);
}

std::uint64_t ParamSet::checksum(bool frozen_only) const {
  std::uint64_t h = kFnvOffset;
  for (const auto& [name, p] : params_)
    if (!frozen_only || !p.trainable) hash_entry(h, name, p.value);
  return h;
}

std::uint64_t ParamSet::checksum_of(const std::vector<std::string>& names) const {
  std::uint64_t h = kFnvOffset;
  for (const auto& name : names) hash_entry(h, name, value(name));
  return h;
}

void ParamSet::quantize_f32() {
  for (auto& [_, p] : params_) xmts::diff::quantize_f32(p.value);
}

bool ParamSet::operator==(const ParamSet& o) const {
  if (params_.size() != o.params_.size()) return false;
  auto a = params_.begin();
  auto b = o.params_.begin();
  for (; a != params_.end(); ++a, ++b)
    if (a->first != b->first || !(a->second.value == b->second.value)) return false;
  return true;
}

}  // namespace xmts::diff
