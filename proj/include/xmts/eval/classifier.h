// xmts/include/xmts/eval/classifier.h

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

#include <optional>
#include <string>
#include <vector>

#include "xmts/diff/graph.h"
#include "xmts/nlu/model.h"

namespace xmts::eval {

using diff::ParamSet;
using diff::Tensor;
using nlu::Embedding;

struct ClassifierConfig {
  std::size_t steps = 500;
  double lr = 1e-2;
  std::uint64_t seed = 1;
};

/// One affine layer D -> C under clf.weight / clf.bias, softmax output.
struct Classifier {
  std::size_t dim = 0;
  int num_classes = 0;
  ParamSet params;
  ClassifierConfig config;

  static Classifier zeros(std::size_t dim, int num_classes);
};

// Stacks embeddings into an N x D matrix; all widths must agree.
Tensor stack_embeddings(const std::vector<Embedding>& embs);

// Mean cross-entropy of the classifier over a labeled set, as a graph node.
diff::Var classifier_loss(diff::Graph& g, diff::Var features, const std::vector<int>& labels);
double classifier_loss_value(const Classifier& clf, const std::vector<Embedding>& embs,
                             const std::vector<int>& labels);

// Full-batch Adam on mean cross-entropy from a zero initialization.
Classifier train_classifier(const std::vector<Embedding>& embs, const std::vector<int>& labels,
                            const ClassifierConfig& cfg);

// Continues Adam training from an existing classifier.
void continue_classifier(Classifier& clf, const std::vector<Embedding>& embs,
                         const std::vector<int>& labels, std::size_t steps, double lr);

// Argmax class per embedding; ties resolve to the lowest class id.
std::vector<int> predict(const Classifier& clf, const std::vector<Embedding>& embs);

struct UtteranceResult {
  std::string id;
  int label = 0;
  int predicted = 0;
  std::optional<double> wer;
  bool empty_hypothesis = false;
};

struct EvalResult {
  std::vector<UtteranceResult> records;
  double accuracy = 0.0;
  std::size_t correct = 0;
};

EvalResult evaluate(const Classifier& clf, const std::vector<Embedding>& embs,
                    const std::vector<int>& labels, const std::vector<std::string>& ids = {});

struct GridChoice {
  Classifier classifier;
  double valid_accuracy = 0.0;
  std::vector<std::pair<ClassifierConfig, double>> tried;  // config, valid accuracy
};

// Trains one classifier per (lr, steps) pair and keeps the best on the
// validation set; earlier grid entries win ties.
GridChoice select_classifier(const std::vector<Embedding>& train, const std::vector<int>& train_labels,
                             const std::vector<Embedding>& valid, const std::vector<int>& valid_labels,
                             const std::vector<double>& lrs, const std::vector<std::size_t>& steps,
                             std::uint64_t seed);

}  // namespace xmts::eval
