// xmts/include/xmts/diff/graph.h

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

#include <deque>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "xmts/diff/params.h"
#include "xmts/diff/tensor.h"

namespace xmts::diff {

class Graph;

/// Handle to a node on a Graph tape.
class Var {
 public:
  Var() = default;
  bool valid() const { return g_ != nullptr; }
  int id() const { return id_; }
  Graph& graph() const { return *g_; }
  const Tensor& value() const;

 private:
  friend class Graph;
  Var(Graph* g, int id) : g_(g), id_(id) {}
  Graph* g_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode tape. Nodes are appended in evaluation order; backward()
/// walks them in reverse creation order, which is a valid reverse topological
/// order, and gradient contributions are summed in that fixed order.
///
/// A Graph is single-threaded. Independent utterances get independent graphs
/// over the same (read-only) ParamSet.
class Graph {
 public:
  // Called with the node's output gradient and output value.
  using Backward = std::function<void(Graph&, const Tensor& out_grad, const Tensor& out_value)>;

  explicit Graph(const ParamSet* params = nullptr, bool grad_enabled = true)
      : params_(params), grad_enabled_(grad_enabled) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor t);
  // Differentiable leaf not tied to a ParamSet entry.
  Var input(Tensor t);
  // Leaf bound to a ParamSet entry; repeated calls return the same node.
  // Frozen parameters become constants.
  Var param(const std::string& name);

  const Tensor& value(Var v) const;
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  bool grad_enabled() const { return grad_enabled_; }

  // Gradient of the loss w.r.t. v after backward(); zeros if nothing flowed.
  Tensor grad(Var v) const;
  // Lazily allocated gradient buffer used by backward closures.
  Tensor& grad_buffer(Var v);
  void accumulate(Var v, const Tensor& g);

  Var record(const char* op, Tensor value, std::initializer_list<Var> parents, Backward bw);
  Var record(const char* op, Tensor value, const std::vector<Var>& parents, Backward bw);

  void backward(Var loss);

  // Gradients for every trainable parameter touched by the graph.
  Gradients param_grads() const;

  void mark_non_differentiable(const char* op);
  bool non_differentiable() const { return !non_diff_op_.empty(); }
  const std::string& non_differentiable_op() const { return non_diff_op_; }
  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ref = nullptr;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    const char* op = "";
    std::string param_name;
    Backward backward;
    const Tensor& value() const { return ref ? *ref : owned; }
  };

  Var push(Node n);

  const ParamSet* params_;
  bool grad_enabled_;
  std::deque<Node> nodes_;
  std::map<std::string, int> param_nodes_;
  std::string non_diff_op_;
  bool backward_done_ = false;
};

inline const Tensor& Var::value() const { return g_->value(*this); }

}  // namespace xmts::diff
