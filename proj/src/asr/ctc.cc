// xmts/src/asr/ctc.cc

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

#include "xmts/asr/ctc.h"

#include <cmath>
#include <limits>

#include "xmts/diff/errors.h"

namespace xmts::asr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace

std::size_t ctc_min_frames(const synth::TokenSequence& target) {
  std::size_t n = target.size();
  for (std::size_t i = 1; i < target.size(); ++i) n += target[i] == target[i - 1];
  return n;
}

diff::Var ctc_loss(diff::Var logprobs, const synth::TokenSequence& target, int blank) {
  using diff::Tensor;
  const Tensor& lp = logprobs.value();
  const std::size_t T = lp.rows(), V = lp.cols();
  require(blank >= 0 && static_cast<std::size_t>(blank) < V, "ctc_loss: blank id out of range");
  for (int t : target)
    require(t >= 0 && static_cast<std::size_t>(t) < V && t != blank,
            "ctc_loss: target token out of range or equal to blank");
  for (std::size_t t = 0; t < T; ++t) {
    double z = kNegInf;
    for (std::size_t k = 0; k < V; ++k) z = log_add(z, lp(t, k));
    require(std::abs(z) <= 1e-6, "ctc_loss: row " + std::to_string(t) + " is not normalized");
  }
  if (ctc_min_frames(target) > T)
    throw InfeasibleAlignment("ctc_loss: target of length " + std::to_string(target.size()) +
                              " needs " + std::to_string(ctc_min_frames(target)) +
                              " frames, input has " + std::to_string(T));

  const std::size_t S = 2 * target.size() + 1;
  std::vector<int> ext(S, blank);
  for (std::size_t i = 0; i < target.size(); ++i) ext[2 * i + 1] = target[i];
  auto skip_ok = [&](std::size_t s) {  // may jump from s-2 into s
    return s >= 2 && ext[s] != blank && ext[s] != ext[s - 2];
  };

  std::vector<double> alpha(T * S, kNegInf), beta(T * S, kNegInf);
  auto A = [&](std::size_t t, std::size_t s) -> double& { return alpha[t * S + s]; };
  auto B = [&](std::size_t t, std::size_t s) -> double& { return beta[t * S + s]; };

  A(0, 0) = lp(0, static_cast<std::size_t>(blank));
  if (S > 1) A(0, 1) = lp(0, static_cast<std::size_t>(ext[1]));
  for (std::size_t t = 1; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      double a = A(t - 1, s);
      if (s >= 1) a = log_add(a, A(t - 1, s - 1));
      if (skip_ok(s)) a = log_add(a, A(t - 1, s - 2));
      if (a != kNegInf) A(t, s) = a + lp(t, static_cast<std::size_t>(ext[s]));
    }
  double log_p = A(T - 1, S - 1);
  if (S > 1) log_p = log_add(log_p, A(T - 1, S - 2));
  if (log_p == kNegInf) throw InfeasibleAlignment("ctc_loss: no alignment has nonzero probability");

  // beta(t, s): log probability of finishing from state s at t, not counting
  // the emission at t itself.
  B(T - 1, S - 1) = 0.0;
  if (S > 1) B(T - 1, S - 2) = 0.0;
  for (std::size_t t = T - 1; t-- > 0;)
    for (std::size_t s = 0; s < S; ++s) {
      auto step = [&](std::size_t s2) {
        return lp(t + 1, static_cast<std::size_t>(ext[s2])) + B(t + 1, s2);
      };
      double b = step(s);
      if (s + 1 < S) b = log_add(b, step(s + 1));
      if (s + 2 < S && skip_ok(s + 2)) b = log_add(b, step(s + 2));
      B(t, s) = b;
    }

  Tensor grad(lp.shape(), 0.0);
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t s = 0; s < S; ++s) {
      const double occ = A(t, s) + B(t, s);
      if (occ == kNegInf) continue;
      grad(t, static_cast<std::size_t>(ext[s])) -= std::exp(occ - log_p);
    }

  diff::Graph& g = logprobs.graph();
  return g.record("ctc_loss", Tensor::scalar(-log_p), {logprobs},
                  [logprobs, grad](diff::Graph& gr, const Tensor& dy, const Tensor&) {
                    Tensor d = grad;
                    const double s = dy.item();
                    for (double& v : d.storage()) v *= s;
                    gr.accumulate(logprobs, d);
                  });
}

}  // namespace xmts::asr
