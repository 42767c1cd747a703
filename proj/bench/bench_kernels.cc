// xmts/bench/bench_kernels.cc

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

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "xmts/diff/ops.h"
#include "xmts/kernels/gemm.h"
#include "xmts/nnet/batch.h"
#include "xmts/nnet/transformer.h"

namespace {

using namespace xmts;

std::vector<double> random_buffer(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 r(seed);
  std::normal_distribution<double> d;
  std::vector<double> v(n);
  for (auto& x : v) x = d(r);
  return v;
}

template <bool kParallel>
void BM_Gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const kernels::GemmArgs args{kernels::Trans::kNo, kernels::Trans::kYes, n, n, n, false};
  const auto a = random_buffer(n * n, 1);
  const auto b = random_buffer(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    if (kParallel) kernels::gemm(args, a, b, c);
    else kernels::gemm_reference(args, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_Gemm<false>)->Name("gemm/reference")->Arg(16)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Gemm<true>)->Name("gemm/parallel")->Arg(16)->Arg(64)->Arg(128)->Arg(256);

// One transformer layer forward and backward per batch item.
template <bool kParallel>
void BM_Batch(benchmark::State& state) {
  const auto items = static_cast<std::size_t>(state.range(0));
  nnet::TransformerStack stack("s", {16, 2, 32, 1});
  diff::ParamSet ps;
  Rng rng(3);
  stack.init(ps, rng);
  std::vector<diff::Tensor> inputs;
  for (std::size_t i = 0; i < items; ++i)
    inputs.push_back(diff::Tensor::matrix(12, 16, random_buffer(12 * 16, 10 + i)));
  auto item = [&](std::size_t i, diff::Graph& g) {
    return diff::sum(stack.encode(g, g.constant(inputs[i])));
  };
  for (auto _ : state) {
    auto res = nnet::batch_forward_backward(ps, items, item, 1.0, kParallel);
    benchmark::DoNotOptimize(res.loss_sum);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(items));
}
BENCHMARK(BM_Batch<false>)->Name("batch/serial")->Arg(4)->Arg(16);
BENCHMARK(BM_Batch<true>)->Name("batch/parallel")->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
