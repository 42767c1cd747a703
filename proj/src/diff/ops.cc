// xmts/src/diff/ops.cc

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

#include "xmts/diff/ops.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "xmts/diff/errors.h"
#include "xmts/kernels/gemm.h"

namespace xmts::diff {

using kernels::Trans;

namespace {

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.same_shape(b), std::string(op) + ": shape mismatch " + shape_str(a.shape()) +
                               " vs " + shape_str(b.shape()));
}

// Elementwise op with derivative df(x).
template <class F, class DF>
Var unary(const char* op, Var a, F f, DF df) {
  Tensor out = a.value();
  for (double& v : out.storage()) v = f(v);
  return a.graph().record(op, std::move(out), {a},
                          [a, df](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            const Tensor& x = a.value();
                            Tensor& dx = g.grad_buffer(a);
                            for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i] * df(x[i]);
                          });
}

}  // namespace

Var add(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.graph().record("add", std::move(out), {a, b},
                          [a, b](Graph& g, const Tensor& dy, const Tensor&) {
                            g.accumulate(a, dy);
                            g.accumulate(b, dy);
                          });
}

Var sub(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.graph().record("sub", std::move(out), {a, b},
                          [a, b](Graph& g, const Tensor& dy, const Tensor&) {
                            g.accumulate(a, dy);
                            if (!g.requires_grad(b)) return;
                            Tensor& db = g.grad_buffer(b);
                            for (std::size_t i = 0; i < db.size(); ++i) db[i] -= dy[i];
                          });
}

Var mul(Var a, Var b) {
  check_same_shape(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.graph().record("mul", std::move(out), {a, b},
                          [a, b](Graph& g, const Tensor& dy, const Tensor&) {
                            if (g.requires_grad(a)) {
                              Tensor& da = g.grad_buffer(a);
                              for (std::size_t i = 0; i < da.size(); ++i)
                                da[i] += dy[i] * b.value()[i];
                            }
                            if (g.requires_grad(b)) {
                              Tensor& db = g.grad_buffer(b);
                              for (std::size_t i = 0; i < db.size(); ++i)
                                db[i] += dy[i] * a.value()[i];
                            }
                          });
}

Var scale(Var a, double s) {
  Tensor out = a.value();
  for (double& v : out.storage()) v *= s;
  return a.graph().record("scale", std::move(out), {a},
                          [a, s](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * s;
                          });
}

Var add_row(Var a, Var bias) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  require(bias.value().size() == cols, "add_row: bias width " +
                                           std::to_string(bias.value().size()) + " != " +
                                           std::to_string(cols));
  Tensor out = x;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out(r, c) += bias.value()[c];
  return a.graph().record("add_row", std::move(out), {a, bias},
                          [a, bias, rows, cols](Graph& g, const Tensor& dy, const Tensor&) {
                            g.accumulate(a, dy);
                            if (!g.requires_grad(bias)) return;
                            Tensor& db = g.grad_buffer(bias);
                            for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t c = 0; c < cols; ++c) db[c] += dy(r, c);
                          });
}

Var matmul(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& w = b.value();
  require(x.cols() == w.rows(),
          "matmul: inner dims " + shape_str(x.shape()) + " x " + shape_str(w.shape()));
  const std::size_t m = x.rows(), k = x.cols(), n = w.cols();
  Tensor out = Tensor::matrix(m, n);
  kernels::gemm({Trans::kNo, Trans::kNo, m, n, k, false}, x.data(), w.data(), out.data());
  return a.graph().record(
      "matmul", std::move(out), {a, b}, [a, b, m, n, k](Graph& g, const Tensor& dy, const Tensor&) {
        if (g.requires_grad(a))
          kernels::gemm({Trans::kNo, Trans::kYes, m, k, n, true}, dy.data(), b.value().data(),
                        g.grad_buffer(a).data());
        if (g.requires_grad(b))
          kernels::gemm({Trans::kYes, Trans::kNo, k, n, m, true}, a.value().data(), dy.data(),
                        g.grad_buffer(b).data());
      });
}

Var matmul_nt(Var a, Var b) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.cols() == y.cols(),
          "matmul_nt: inner dims " + shape_str(x.shape()) + " x " + shape_str(y.shape()) + "^T");
  const std::size_t m = x.rows(), k = x.cols(), n = y.rows();
  Tensor out = Tensor::matrix(m, n);
  kernels::gemm({Trans::kNo, Trans::kYes, m, n, k, false}, x.data(), y.data(), out.data());
  return a.graph().record(
      "matmul_nt", std::move(out), {a, b},
      [a, b, m, n, k](Graph& g, const Tensor& dy, const Tensor&) {
        if (g.requires_grad(a))
          kernels::gemm({Trans::kNo, Trans::kNo, m, k, n, true}, dy.data(), b.value().data(),
                        g.grad_buffer(a).data());
        if (g.requires_grad(b))
          kernels::gemm({Trans::kYes, Trans::kNo, n, k, m, true}, dy.data(), a.value().data(),
                        g.grad_buffer(b).data());
      });
}

Var transpose(Var a) {
  const Tensor& x = a.value();
  const std::size_t r = x.rows(), c = x.cols();
  Tensor out = Tensor::matrix(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out(j, i) = x(i, j);
  return a.graph().record("transpose", std::move(out), {a},
                          [a, r, c](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t i = 0; i < r; ++i)
                              for (std::size_t j = 0; j < c; ++j) da[i * c + j] += dy(j, i);
                          });
}

Var gelu(Var a) {
  return unary(
      "gelu", a, [](double x) { return 0.5 * x * (1.0 + std::erf(x / std::numbers::sqrt2)); },
      [](double x) {
        const double cdf = 0.5 * (1.0 + std::erf(x / std::numbers::sqrt2));
        const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        return cdf + x * pdf;
      });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var abs(Var a) {
  return unary(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var square(Var a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x) { return 2.0 * x; });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return a.graph().record("sum", Tensor::scalar(s), {a},
                          [a](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            for (double& v : g.grad_buffer(a).storage()) v += dy[0];
                          });
}

Var mean(Var a) { return scale(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var log_softmax_rows(Var a) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  Tensor out = Tensor::matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cols; ++c) mx = std::max(mx, x(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) z += std::exp(x(r, c) - mx);
    const double lse = mx + std::log(z);
    for (std::size_t c = 0; c < cols; ++c) out(r, c) = x(r, c) - lse;
  }
  return a.graph().record("log_softmax_rows", std::move(out), {a},
                          [a, rows, cols](Graph& g, const Tensor& dy, const Tensor& y) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t r = 0; r < rows; ++r) {
                              double s = 0.0;
                              for (std::size_t c = 0; c < cols; ++c) s += dy(r, c);
                              for (std::size_t c = 0; c < cols; ++c)
                                da(r, c) += dy(r, c) - std::exp(y(r, c)) * s;
                            }
                          });
}

Var softmax_rows(Var a, const ValidMask& key_valid, bool causal) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  require(key_valid.empty() || key_valid.size() == cols,
          "softmax_rows: mask length " + std::to_string(key_valid.size()) + " != " +
              std::to_string(cols));
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  Tensor out = Tensor::matrix(rows, cols);
  std::vector<double> biased(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = kNegInf;
    for (std::size_t c = 0; c < cols; ++c) {
      const bool valid = (key_valid.empty() || key_valid[c]) && (!causal || c <= r);
      biased[c] = valid ? x(r, c) : kNegInf;
      mx = std::max(mx, biased[c]);
    }
    require(mx != kNegInf, "softmax_rows: row " + std::to_string(r) + " has no valid key");
    double z = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      out(r, c) = std::exp(biased[c] - mx);
      z += out(r, c);
    }
    for (std::size_t c = 0; c < cols; ++c) out(r, c) /= z;
  }
  return a.graph().record("softmax_rows", std::move(out), {a},
                          [a, rows, cols](Graph& g, const Tensor& dy, const Tensor& y) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t r = 0; r < rows; ++r) {
                              double s = 0.0;
                              for (std::size_t c = 0; c < cols; ++c) s += dy(r, c) * y(r, c);
                              for (std::size_t c = 0; c < cols; ++c)
                                da(r, c) += y(r, c) * (dy(r, c) - s);
                            }
                          });
}

Var layer_norm_rows(Var xv, Var gamma, Var beta, double eps) {
  const Tensor& x = xv.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  require(gamma.value().size() == cols && beta.value().size() == cols,
          "layer_norm_rows: gain/bias width must equal " + std::to_string(cols));
  Tensor out = Tensor::matrix(rows, cols);
  auto xhat = std::make_shared<Tensor>(Tensor::matrix(rows, cols));
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  const double n = static_cast<double>(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double mu = 0.0;
    for (std::size_t c = 0; c < cols; ++c) mu += x(r, c);
    mu /= n;
    double var = 0.0;
    for (std::size_t c = 0; c < cols; ++c) var += (x(r, c) - mu) * (x(r, c) - mu);
    var /= n;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t c = 0; c < cols; ++c) {
      (*xhat)(r, c) = (x(r, c) - mu) * is;
      out(r, c) = gamma.value()[c] * (*xhat)(r, c) + beta.value()[c];
    }
  }
  return xv.graph().record(
      "layer_norm_rows", std::move(out), {xv, gamma, beta},
      [xv, gamma, beta, xhat, inv_std, rows, cols, n](Graph& g, const Tensor& dy, const Tensor&) {
        if (g.requires_grad(gamma)) {
          Tensor& dg = g.grad_buffer(gamma);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) dg[c] += dy(r, c) * (*xhat)(r, c);
        }
        if (g.requires_grad(beta)) {
          Tensor& db = g.grad_buffer(beta);
          for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) db[c] += dy(r, c);
        }
        if (!g.requires_grad(xv)) return;
        Tensor& dx = g.grad_buffer(xv);
        const Tensor& gv = gamma.value();
        for (std::size_t r = 0; r < rows; ++r) {
          double m1 = 0.0, m2 = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            const double dxh = dy(r, c) * gv[c];
            m1 += dxh;
            m2 += dxh * (*xhat)(r, c);
          }
          m1 /= n;
          m2 /= n;
          for (std::size_t c = 0; c < cols; ++c) {
            const double dxh = dy(r, c) * gv[c];
            dx(r, c) += (*inv_std)[r] * (dxh - m1 - (*xhat)(r, c) * m2);
          }
        }
      });
}

Var slice_cols(Var a, std::size_t start, std::size_t len) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  require(len > 0 && start + len <= cols, "slice_cols: range out of bounds");
  Tensor out = Tensor::matrix(rows, len);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < len; ++c) out(r, c) = x(r, start + c);
  return a.graph().record("slice_cols", std::move(out), {a},
                          [a, start, len, rows, cols](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t r = 0; r < rows; ++r)
                              for (std::size_t c = 0; c < len; ++c)
                                da[r * cols + start + c] += dy(r, c);
                          });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols: no inputs");
  const std::size_t rows = parts[0].value().rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    require(p.value().rows() == rows, "concat_cols: row count mismatch");
    cols += p.value().cols();
  }
  Tensor out = Tensor::matrix(rows, cols);
  std::size_t off = 0;
  for (const Var& p : parts) {
    const Tensor& x = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, off + c) = x(r, c);
    off += x.cols();
  }
  return parts[0].graph().record("concat_cols", std::move(out), parts,
                                 [parts, rows](Graph& g, const Tensor& dy, const Tensor&) {
                                   std::size_t off = 0;
                                   for (const Var& p : parts) {
                                     const std::size_t pc = p.value().cols();
                                     if (g.requires_grad(p)) {
                                       Tensor& dp = g.grad_buffer(p);
                                       for (std::size_t r = 0; r < rows; ++r)
                                         for (std::size_t c = 0; c < pc; ++c)
                                           dp[r * pc + c] += dy(r, off + c);
                                     }
                                     off += pc;
                                   }
                                 });
}

Var slice_rows(Var a, std::size_t start, std::size_t len) {
  const Tensor& x = a.value();
  const std::size_t cols = x.cols();
  require(len > 0 && start + len <= x.rows(), "slice_rows: range out of bounds");
  std::vector<double> data(x.data().begin() + static_cast<long>(start * cols),
                           x.data().begin() + static_cast<long>((start + len) * cols));
  return a.graph().record("slice_rows", Tensor::matrix(len, cols, std::move(data)), {a},
                          [a, start, cols](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t i = 0; i < dy.size(); ++i)
                              da[start * cols + i] += dy[i];
                          });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  const std::size_t cols = parts[0].value().cols();
  std::vector<double> data;
  for (const Var& p : parts) {
    require(p.value().cols() == cols, "concat_rows: column count mismatch");
    data.insert(data.end(), p.value().data().begin(), p.value().data().end());
  }
  const std::size_t rows = data.size() / cols;
  return parts[0].graph().record("concat_rows", Tensor::matrix(rows, cols, std::move(data)), parts,
                                 [parts](Graph& g, const Tensor& dy, const Tensor&) {
                                   std::size_t off = 0;
                                   for (const Var& p : parts) {
                                     const std::size_t n = p.value().size();
                                     if (g.requires_grad(p)) {
                                       Tensor& dp = g.grad_buffer(p);
                                       for (std::size_t i = 0; i < n; ++i) dp[i] += dy[off + i];
                                     }
                                     off += n;
                                   }
                                 });
}

Var stack_rows(Var a, std::size_t factor) {
  require(factor >= 1, "stack_rows: factor must be >= 1");
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  const std::size_t out_rows = (rows + factor - 1) / factor;
  // Row-major layout makes stacking a zero-padded reshape.
  std::vector<double> data(out_rows * factor * cols, 0.0);
  std::copy(x.data().begin(), x.data().end(), data.begin());
  return a.graph().record("stack_rows", Tensor::matrix(out_rows, factor * cols, std::move(data)),
                          {a}, [a](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i];
                          });
}

Var mean_rows(Var a, const ValidMask& valid) {
  const Tensor& x = a.value();
  const std::size_t rows = x.rows(), cols = x.cols();
  require(valid.empty() || valid.size() == rows, "mean_rows: mask length " +
                                                     std::to_string(valid.size()) + " != " +
                                                     std::to_string(rows));
  std::size_t count = 0;
  Tensor out = Tensor::matrix(1, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!valid.empty() && !valid[r]) continue;
    ++count;
    for (std::size_t c = 0; c < cols; ++c) out[c] += x(r, c);
  }
  require(count > 0, "mean_rows: no valid position");
  const double inv = 1.0 / static_cast<double>(count);
  for (double& v : out.storage()) v *= inv;
  return a.graph().record("mean_rows", std::move(out), {a},
                          [a, valid, rows, cols, inv](Graph& g, const Tensor& dy, const Tensor&) {
                            if (!g.requires_grad(a)) return;
                            Tensor& da = g.grad_buffer(a);
                            for (std::size_t r = 0; r < rows; ++r) {
                              if (!valid.empty() && !valid[r]) continue;
                              for (std::size_t c = 0; c < cols; ++c) da(r, c) += dy[c] * inv;
                            }
                          });
}

Var gather_rows(Var table, const std::vector<int>& ids) {
  const Tensor& t = table.value();
  const std::size_t vocab = t.rows(), cols = t.cols();
  require(!ids.empty(), "gather_rows: empty id list");
  Tensor out = Tensor::matrix(ids.size(), cols);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] >= 0 && static_cast<std::size_t>(ids[i]) < vocab,
            "gather_rows: id " + std::to_string(ids[i]) + " outside table of " +
                std::to_string(vocab) + " rows");
    for (std::size_t c = 0; c < cols; ++c) out(i, c) = t(static_cast<std::size_t>(ids[i]), c);
  }
  return table.graph().record("gather_rows", std::move(out), {table},
                              [table, ids, cols](Graph& g, const Tensor& dy, const Tensor&) {
                                if (!g.requires_grad(table)) return;
                                Tensor& dt = g.grad_buffer(table);
                                for (std::size_t i = 0; i < ids.size(); ++i)
                                  for (std::size_t c = 0; c < cols; ++c)
                                    dt(static_cast<std::size_t>(ids[i]), c) += dy(i, c);
                              });
}

Var nll_rows(Var logp, const std::vector<int>& targets) {
  const Tensor& x = logp.value();
  require(targets.size() == x.rows(), "nll_rows: need one target per row");
  double s = 0.0;
  for (std::size_t r = 0; r < targets.size(); ++r) {
    require(targets[r] >= 0 && static_cast<std::size_t>(targets[r]) < x.cols(),
            "nll_rows: target out of range");
    s -= x(r, static_cast<std::size_t>(targets[r]));
  }
  return logp.graph().record("nll_rows", Tensor::scalar(s), {logp},
                             [logp, targets](Graph& g, const Tensor& dy, const Tensor&) {
                               if (!g.requires_grad(logp)) return;
                               Tensor& d = g.grad_buffer(logp);
                               for (std::size_t r = 0; r < targets.size(); ++r)
                                 d(r, static_cast<std::size_t>(targets[r])) -= dy[0];
                             });
}

Var cosine_similarity(Var a, Var b, double floor, bool* floored) {
  const Tensor& x = a.value();
  const Tensor& y = b.value();
  require(x.size() == y.size(), "cosine_similarity: width mismatch " +
                                    std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  nx = std::sqrt(nx);
  ny = std::sqrt(ny);
  const bool fx = nx < floor, fy = ny < floor;
  if (floored) *floored = fx || fy;
  const double na = fx ? floor : nx, nb = fy ? floor : ny;
  const double cos = dot / (na * nb);
  return a.graph().record(
      "cosine_similarity", Tensor::scalar(cos), {a, b},
      [a, b, na, nb, fx, fy, cos](Graph& g, const Tensor& dy, const Tensor&) {
        // d cos / d a = b / (|a||b|) - cos * a / |a|^2 (second term absent when floored)
        const Tensor& x = a.value();
        const Tensor& y = b.value();
        if (g.requires_grad(a)) {
          Tensor& da = g.grad_buffer(a);
          for (std::size_t i = 0; i < da.size(); ++i)
            da[i] += dy[0] * (y[i] / (na * nb) - (fx ? 0.0 : cos * x[i] / (na * na)));
        }
        if (g.requires_grad(b)) {
          Tensor& db = g.grad_buffer(b);
          for (std::size_t i = 0; i < db.size(); ++i)
            db[i] += dy[0] * (x[i] / (na * nb) - (fy ? 0.0 : cos * y[i] / (nb * nb)));
        }
      });
}

Var argmax_onehot(Var a) {
  const Tensor& x = a.value();
  Tensor out = Tensor::matrix(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < x.cols(); ++c)
      if (x(r, c) > x(r, best)) best = c;
    out(r, best) = 1.0;
  }
  a.graph().mark_non_differentiable("argmax_onehot");
  return a.graph().record("argmax_onehot", std::move(out), {a}, nullptr);
}

}  // namespace xmts::diff
