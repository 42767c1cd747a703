// xmts/src/diff/graph.cc

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

#include "xmts/diff/graph.h"

#include "xmts/diff/errors.h"

namespace xmts::diff {

Var Graph::push(Node n) {
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size() - 1));
}

Var Graph::constant(Tensor t) {
  if (!t.all_finite()) throw NumericFault("constant");
  Node n;
  n.owned = std::move(t);
  n.op = "constant";
  return push(std::move(n));
}

Var Graph::input(Tensor t) {
  if (!t.all_finite()) throw NumericFault("input");
  Node n;
  n.owned = std::move(t);
  n.op = "input";
  n.requires_grad = grad_enabled_;
  return push(std::move(n));
}

Var Graph::param(const std::string& name) {
  require(params_ != nullptr, "graph has no parameter set; cannot bind '" + name + "'");
  if (auto it = param_nodes_.find(name); it != param_nodes_.end()) return Var(this, it->second);
  Node n;
  n.ref = &params_->value(name);
  n.op = "param";
  n.param_name = name;
  n.requires_grad = grad_enabled_ && params_->trainable(name);
  Var v = push(std::move(n));
  param_nodes_.emplace(name, v.id());
  return v;
}

const Tensor& Graph::value(Var v) const {
  require(v.g_ == this, "variable belongs to a different graph");
  return nodes_[v.id()].value();
}

Tensor Graph::grad(Var v) const {
  const Node& n = nodes_[v.id()];
  if (n.has_grad) return n.grad;
  return Tensor(n.value().shape(), 0.0);
}

Tensor& Graph::grad_buffer(Var v) {
  Node& n = nodes_[v.id()];
  if (!n.has_grad) {
    n.grad = Tensor(n.value().shape(), 0.0);
    n.has_grad = true;
  }
  return n.grad;
}

void Graph::accumulate(Var v, const Tensor& g) {
  if (!requires_grad(v)) return;
  Tensor& buf = grad_buffer(v);
  require(buf.size() == g.size(), std::string("gradient shape mismatch at op '") +
                                      nodes_[v.id()].op + "'");
  auto dst = buf.data();
  auto src = g.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

Var Graph::record(const char* op, Tensor value, std::initializer_list<Var> parents, Backward bw) {
  return record(op, std::move(value), std::vector<Var>(parents), std::move(bw));
}

Var Graph::record(const char* op, Tensor value, const std::vector<Var>& parents, Backward bw) {
  if (!value.all_finite()) throw NumericFault(op);
  Node n;
  n.owned = std::move(value);
  n.op = op;
  if (grad_enabled_) {
    for (const Var& p : parents) {
      require(p.g_ == this, std::string("op '") + op + "' mixes graphs");
      if (nodes_[p.id()].requires_grad) n.requires_grad = true;
    }
  }
  if (n.requires_grad) n.backward = std::move(bw);
  return push(std::move(n));
}

void Graph::backward(Var loss) {
  require(loss.g_ == this, "loss belongs to a different graph");
  require(value(loss).size() == 1,
          "backward() needs a scalar loss, got shape " + shape_str(value(loss).shape()));
  require(!backward_done_, "backward() already ran on this graph");
  backward_done_ = true;
  if (!requires_grad(loss)) return;
  grad_buffer(loss).fill(1.0);
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || !n.has_grad || !n.backward) continue;
    n.backward(*this, n.grad, n.value());
  }
}

Gradients Graph::param_grads() const {
  Gradients out;
  for (const auto& [name, id] : param_nodes_) {
    const Node& n = nodes_[id];
    if (!n.requires_grad) continue;
    out.emplace(name, n.has_grad ? n.grad : Tensor(n.value().shape(), 0.0));
  }
  return out;
}

void Graph::mark_non_differentiable(const char* op) {
  if (non_diff_op_.empty()) non_diff_op_ = op;
}

}  // namespace xmts::diff
