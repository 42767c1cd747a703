// xmts/src/eval/classifier.cc

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

#include "xmts/eval/classifier.h"

#include <cmath>
#include <set>

#include "xmts/diff/adam.h"
#include "xmts/diff/autodiff.h"
#include "xmts/diff/errors.h"
#include "xmts/diff/ops.h"

namespace xmts::eval {

namespace {

diff::Var logits(diff::Graph& g, diff::Var x) {
  return diff::add_row(diff::matmul(x, g.param("clf.weight")), g.param("clf.bias"));
}

void check_labels(const std::vector<Embedding>& embs, const std::vector<int>& labels, int classes) {
  require(embs.size() == labels.size(), "classifier: embedding and label counts differ");
  for (int l : labels) require(l >= 0 && l < classes, "classifier: label out of range");
}

}  // namespace

Classifier Classifier::zeros(std::size_t dim, int num_classes) {
  require(dim > 0 && num_classes >= 2, "classifier: need a positive width and >= 2 classes");
  Classifier c;
  c.dim = dim;
  c.num_classes = num_classes;
  c.params.add("clf.weight", Tensor::matrix(dim, static_cast<std::size_t>(num_classes), 0.0));
  c.params.add("clf.bias", Tensor(diff::Shape{static_cast<std::size_t>(num_classes)}, 0.0));
  return c;
}

Tensor stack_embeddings(const std::vector<Embedding>& embs) {
  require(!embs.empty(), "stack_embeddings: empty set");
  const std::size_t d = embs.front().size();
  std::vector<double> data;
  data.reserve(embs.size() * d);
  for (const auto& e : embs) {
    require(e.size() == d, "stack_embeddings: conflicting widths " + std::to_string(d) + " and " +
                               std::to_string(e.size()));
    data.insert(data.end(), e.begin(), e.end());
  }
  return Tensor::matrix(embs.size(), d, std::move(data));
}

diff::Var classifier_loss(diff::Graph& g, diff::Var features, const std::vector<int>& labels) {
  diff::Var nll = diff::nll_rows(diff::log_softmax_rows(logits(g, features)), labels);
  return diff::scale(nll, 1.0 / static_cast<double>(labels.size()));
}

double classifier_loss_value(const Classifier& clf, const std::vector<Embedding>& embs,
                             const std::vector<int>& labels) {
  check_labels(embs, labels, clf.num_classes);
  Tensor x = stack_embeddings(embs);
  return diff::forward_only(clf.params, [&](diff::Graph& g) {
    return classifier_loss(g, g.constant(x), labels);
  });
}

void continue_classifier(Classifier& clf, const std::vector<Embedding>& embs,
                         const std::vector<int>& labels, std::size_t steps, double lr) {
  check_labels(embs, labels, clf.num_classes);
  if (steps == 0) return;
  Tensor x = stack_embeddings(embs);
  require(x.cols() == clf.dim, "classifier: embedding width " + std::to_string(x.cols()) +
                                   " != classifier width " + std::to_string(clf.dim));
  diff::AdamState adam;
  for (std::size_t s = 0; s < steps; ++s) {
    auto lg = diff::forward_backward(clf.params, [&](diff::Graph& g) {
      return classifier_loss(g, g.constant(x), labels);
    });
    diff::adam_step(clf.params, lg.grads, adam, lr);
  }
  clf.params.quantize_f32();
}

Classifier train_classifier(const std::vector<Embedding>& embs, const std::vector<int>& labels,
                            const ClassifierConfig& cfg) {
  require(!embs.empty(), "train_classifier: empty training set");
  std::set<int> distinct(labels.begin(), labels.end());
  require(distinct.size() >= 2, "train_classifier: need at least 2 distinct labels");
  int classes = 0;
  for (int l : labels) classes = std::max(classes, l + 1);
  Classifier clf = Classifier::zeros(embs.front().size(), classes);
  clf.config = cfg;
  continue_classifier(clf, embs, labels, cfg.steps, cfg.lr);
  return clf;
}

std::vector<int> predict(const Classifier& clf, const std::vector<Embedding>& embs) {
  Tensor x = stack_embeddings(embs);
  require(x.cols() == clf.dim, "predict: embedding width " + std::to_string(x.cols()) +
                                   " != classifier width " + std::to_string(clf.dim));
  diff::Graph g(&clf.params, false);
  const Tensor& l = logits(g, g.constant(x)).value();
  std::vector<int> out(embs.size());
  for (std::size_t r = 0; r < l.rows(); ++r) {
    int best = 0;
    for (int c = 1; c < clf.num_classes; ++c)
      if (l(r, static_cast<std::size_t>(c)) > l(r, static_cast<std::size_t>(best))) best = c;
    out[r] = best;
  }
  return out;
}

EvalResult evaluate(const Classifier& clf, const std::vector<Embedding>& embs,
                    const std::vector<int>& labels, const std::vector<std::string>& ids) {
  require(!embs.empty(), "evaluate: empty evaluation set");
  require(labels.size() == embs.size() && (ids.empty() || ids.size() == embs.size()),
          "evaluate: embeddings, labels and ids must have equal length");
  auto pred = predict(clf, embs);
  EvalResult r;
  r.records.resize(embs.size());
  for (std::size_t i = 0; i < embs.size(); ++i) {
    auto& rec = r.records[i];
    rec.id = ids.empty() ? std::to_string(i) : ids[i];
    rec.label = labels[i];
    rec.predicted = pred[i];
    r.correct += pred[i] == labels[i];
  }
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(embs.size());
  return r;
}

GridChoice select_classifier(const std::vector<Embedding>& train, const std::vector<int>& train_labels,
                             const std::vector<Embedding>& valid, const std::vector<int>& valid_labels,
                             const std::vector<double>& lrs, const std::vector<std::size_t>& steps,
                             std::uint64_t seed) {
  require(!lrs.empty() && !steps.empty(), "select_classifier: empty grid");
  GridChoice best;
  bool have = false;
  for (double lr : lrs)
    for (std::size_t s : steps) {
      ClassifierConfig cfg{s, lr, seed};
      Classifier c = train_classifier(train, train_labels, cfg);
      const double acc = evaluate(c, valid, valid_labels).accuracy;
      best.tried.emplace_back(cfg, acc);
      if (!have || acc > best.valid_accuracy) {
        best.classifier = std::move(c);
        best.valid_accuracy = acc;
        have = true;
      }
    }
  return best;
}

}  // namespace xmts::eval
