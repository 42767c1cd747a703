// xmts/include/xmts/diff/errors.h

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
#include <string>

namespace xmts {

// Caller broke a documented precondition (bad shape, empty input, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A forward op produced NaN or Inf.
class NumericFault : public std::runtime_error {
 public:
  NumericFault(const std::string& op, const std::string& detail = "")
      : std::runtime_error("numeric fault in op '" + op + "'" +
                           (detail.empty() ? "" : ": " + detail)),
        op_(op) {}
  const std::string& op() const { return op_; }

 private:
  std::string op_;
};

// The function handed to the finite-difference checker cannot serve as an
// oracle (non-deterministic or contains a non-differentiable op).
class InvalidOracle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public std::runtime_error {
 public:
  enum class Kind { kIo, kMagicMismatch, kVersionMismatch, kTruncated, kDuplicate, kMalformed };
  LoadError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ContractViolation(msg);
}

}  // namespace xmts
