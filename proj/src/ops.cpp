/**
 * Copyright 2026 The SVF Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "svf/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace svf {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

std::size_t sz(std::int64_t v) { return static_cast<std::size_t>(v); }

// Returns the number of elements of `b` (the broadcast period) after
// checking that b.dims() is a suffix of a.dims().
std::int64_t broadcast_period(const Tensor& a, const Tensor& b, const char* op) {
  const auto& ad = a.dims();
  const auto& bd = b.dims();
  bool ok = bd.size() <= ad.size();
  for (std::size_t i = 0; ok && i < bd.size(); ++i) ok = bd[bd.size() - 1 - i] == ad[ad.size() - 1 - i];
  if (!ok) {
    throw std::invalid_argument(std::string(op) + ": cannot broadcast " + dims_to_string(bd) + " onto " +
                                dims_to_string(ad));
  }
  return b.numel();
}

int normalize_axis(int axis, int rank) {
  if (axis < 0) axis += rank;
  if (axis < 0 || axis >= rank) throw std::invalid_argument("axis out of range");
  return axis;
}

struct AxisSplit {
  std::int64_t outer, len, inner;
};

AxisSplit split_axis(const Dims& dims, int axis) {
  AxisSplit s{1, dims[sz(axis)], 1};
  for (int i = 0; i < axis; ++i) s.outer *= dims[sz(i)];
  for (std::size_t i = sz(axis) + 1; i < dims.size(); ++i) s.inner *= dims[i];
  return s;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  const auto period = broadcast_period(a, b, "add");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bd[i % sz(period)];
  auto* an = a.node();
  auto* bn = b.node();
  return Tensor::make_result(a.dims(), std::move(out), {a, b}, [an, bn, period](detail::Node& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i % sz(period)] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  const auto period = broadcast_period(a, b, "sub");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bd[i % sz(period)];
  auto* an = a.node();
  auto* bn = b.node();
  return Tensor::make_result(a.dims(), std::move(out), {a, b}, [an, bn, period](detail::Node& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i % sz(period)] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  const auto period = broadcast_period(a, b, "mul");
  std::vector<double> out(a.data().begin(), a.data().end());
  const auto bd = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bd[i % sz(period)];
  auto* an = a.node();
  auto* bn = b.node();
  return Tensor::make_result(a.dims(), std::move(out), {a, b}, [an, bn, period](detail::Node& self) {
    if (an->requires_grad) {
      an->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * bn->data[i % sz(period)];
    }
    if (bn->requires_grad) {
      bn->ensure_grad();
      for (std::size_t i = 0; i < self.grad.size(); ++i) bn->grad[i % sz(period)] += self.grad[i] * an->data[i];
    }
  });
}

Tensor scale(const Tensor& a, double factor) {
  std::vector<double> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  auto* an = a.node();
  return Tensor::make_result(a.dims(), std::move(out), {a}, [an, factor](detail::Node& self) {
    an->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += factor * self.grad[i];
  });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() < 2 || b.rank() < 2) throw std::invalid_argument("matmul: operands must have rank >= 2");
  const std::int64_t m = a.dim(-2), k = a.dim(-1), n = b.dim(-1);
  if (b.dim(-2) != k) {
    throw std::invalid_argument("matmul: inner dims differ " + dims_to_string(a.dims()) + " x " +
                                dims_to_string(b.dims()));
  }
  Dims out_dims(a.dims().begin(), a.dims().end() - 1);
  out_dims.push_back(n);
  std::vector<double> out(sz(numel(out_dims)));
  auto* an = a.node();
  auto* bn = b.node();

  if (b.rank() == 2) {
    // One GEMM over all leading rows of a.
    const std::int64_t rows = a.numel() / k;
    MutMap(out.data(), rows, n).noalias() = ConstMap(a.data().data(), rows, k) * ConstMap(b.data().data(), k, n);
    return Tensor::make_result(std::move(out_dims), std::move(out), {a, b}, [an, bn, rows, k, n](detail::Node& self) {
      ConstMap dc(self.grad.data(), rows, n);
      if (an->requires_grad) {
        an->ensure_grad();
        MutMap(an->grad.data(), rows, k).noalias() += dc * ConstMap(bn->data.data(), k, n).transpose();
      }
      if (bn->requires_grad) {
        bn->ensure_grad();
        MutMap(bn->grad.data(), k, n).noalias() += ConstMap(an->data.data(), rows, k).transpose() * dc;
      }
    });
  }

  if (a.rank() != b.rank() || !std::equal(a.dims().begin(), a.dims().end() - 2, b.dims().begin())) {
    throw std::invalid_argument("matmul: leading dims differ " + dims_to_string(a.dims()) + " x " +
                                dims_to_string(b.dims()));
  }
  const std::int64_t batch = a.numel() / (m * k);
  for (std::int64_t i = 0; i < batch; ++i) {
    MutMap(out.data() + i * m * n, m, n).noalias() =
        ConstMap(a.data().data() + i * m * k, m, k) * ConstMap(b.data().data() + i * k * n, k, n);
  }
  return Tensor::make_result(std::move(out_dims), std::move(out), {a, b},
                             [an, bn, batch, m, k, n](detail::Node& self) {
                               if (an->requires_grad) an->ensure_grad();
                               if (bn->requires_grad) bn->ensure_grad();
                               for (std::int64_t i = 0; i < batch; ++i) {
                                 ConstMap dc(self.grad.data() + i * m * n, m, n);
                                 if (an->requires_grad) {
                                   MutMap(an->grad.data() + i * m * k, m, k).noalias() +=
                                       dc * ConstMap(bn->data.data() + i * k * n, k, n).transpose();
                                 }
                                 if (bn->requires_grad) {
                                   MutMap(bn->grad.data() + i * k * n, k, n).noalias() +=
                                       ConstMap(an->data.data() + i * m * k, m, k).transpose() * dc;
                                 }
                               }
                             });
}

Tensor softmax(const Tensor& x, int axis) {
  axis = normalize_axis(axis, x.rank());
  const auto s = split_axis(x.dims(), axis);
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::int64_t o = 0; o < s.outer; ++o) {
    for (std::int64_t in = 0; in < s.inner; ++in) {
      const std::int64_t base = o * s.len * s.inner + in;
      double mx = -std::numeric_limits<double>::infinity();
      for (std::int64_t j = 0; j < s.len; ++j) mx = std::max(mx, xd[sz(base + j * s.inner)]);
      double total = 0.0;
      for (std::int64_t j = 0; j < s.len; ++j) {
        const double e = std::exp(xd[sz(base + j * s.inner)] - mx);
        out[sz(base + j * s.inner)] = e;
        total += e;
      }
      for (std::int64_t j = 0; j < s.len; ++j) out[sz(base + j * s.inner)] /= total;
    }
  }
  auto* xn = x.node();
  return Tensor::make_result(x.dims(), std::move(out), {x}, [xn, s](detail::Node& self) {
    xn->ensure_grad();
    for (std::int64_t o = 0; o < s.outer; ++o) {
      for (std::int64_t in = 0; in < s.inner; ++in) {
        const std::int64_t base = o * s.len * s.inner + in;
        double dot = 0.0;
        for (std::int64_t j = 0; j < s.len; ++j) {
          const auto idx = sz(base + j * s.inner);
          dot += self.grad[idx] * self.data[idx];
        }
        for (std::int64_t j = 0; j < s.len; ++j) {
          const auto idx = sz(base + j * s.inner);
          xn->grad[idx] += self.data[idx] * (self.grad[idx] - dot);
        }
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::int64_t d = x.dim(-1);
  if (gamma.numel() != d || beta.numel() != d) throw std::invalid_argument("layer_norm: gamma/beta size mismatch");
  const std::int64_t rows = x.numel() / d;
  const auto xd = x.data();
  const auto gd = gamma.data();
  const auto bd = beta.data();
  auto xhat = std::make_shared<std::vector<double>>(xd.size());
  auto rstd = std::make_shared<std::vector<double>>(sz(rows));
  std::vector<double> out(xd.size());
  for (std::int64_t r = 0; r < rows; ++r) {
    const double* row = xd.data() + r * d;
    double mu = 0.0;
    for (std::int64_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::int64_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    const double rs = 1.0 / std::sqrt(var + eps);
    (*rstd)[sz(r)] = rs;
    for (std::int64_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * rs;
      (*xhat)[sz(r * d + j)] = h;
      out[sz(r * d + j)] = h * gd[sz(j)] + bd[sz(j)];
    }
  }
  auto* xn = x.node();
  auto* gn = gamma.node();
  auto* bn = beta.node();
  return Tensor::make_result(x.dims(), std::move(out), {x, gamma, beta},
                             [xn, gn, bn, xhat, rstd, rows, d](detail::Node& self) {
                               if (gn->requires_grad) gn->ensure_grad();
                               if (bn->requires_grad) bn->ensure_grad();
                               if (xn->requires_grad) xn->ensure_grad();
                               const double inv_d = 1.0 / static_cast<double>(d);
                               for (std::int64_t r = 0; r < rows; ++r) {
                                 const double* dy = self.grad.data() + r * d;
                                 const double* h = xhat->data() + r * d;
                                 double sum_g = 0.0, sum_gh = 0.0;
                                 for (std::int64_t j = 0; j < d; ++j) {
                                   const double g = dy[j] * gn->data[sz(j)];
                                   sum_g += g;
                                   sum_gh += g * h[j];
                                   if (gn->requires_grad) gn->grad[sz(j)] += dy[j] * h[j];
                                   if (bn->requires_grad) bn->grad[sz(j)] += dy[j];
                                 }
                                 if (xn->requires_grad) {
                                   const double rs = (*rstd)[sz(r)];
                                   for (std::int64_t j = 0; j < d; ++j) {
                                     const double g = dy[j] * gn->data[sz(j)];
                                     xn->grad[sz(r * d + j)] += rs * (g - inv_d * sum_g - h[j] * inv_d * sum_gh);
                                   }
                                 }
                               }
                             });
}

Tensor gelu(const Tensor& x) {
  const auto xd = x.data();
  std::vector<double> out(xd.size());
  for (std::size_t i = 0; i < xd.size(); ++i) out[i] = 0.5 * xd[i] * (1.0 + std::erf(xd[i] * M_SQRT1_2));
  auto* xn = x.node();
  return Tensor::make_result(x.dims(), std::move(out), {x}, [xn](detail::Node& self) {
    xn->ensure_grad();
    constexpr double inv_sqrt_2pi = 0.3989422804014327;
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const double v = xn->data[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * M_SQRT1_2));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      xn->grad[i] += self.grad[i] * (cdf + v * pdf);
    }
  });
}

Tensor reshape(const Tensor& x, Dims dims) {
  if (numel(dims) != x.numel()) {
    throw std::invalid_argument("reshape: " + dims_to_string(x.dims()) + " -> " + dims_to_string(dims));
  }
  std::vector<double> out(x.data().begin(), x.data().end());
  auto* xn = x.node();
  return Tensor::make_result(std::move(dims), std::move(out), {x}, [xn](detail::Node& self) {
    xn->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) xn->grad[i] += self.grad[i];
  });
}

Tensor transpose(const Tensor& x, std::span<const int> perm) {
  const int r = x.rank();
  if (static_cast<int>(perm.size()) != r) throw std::invalid_argument("transpose: permutation rank mismatch");
  std::vector<bool> used(sz(r), false);
  for (int p : perm) {
    if (p < 0 || p >= r || used[sz(p)]) throw std::invalid_argument("transpose: invalid permutation");
    used[sz(p)] = true;
  }
  const auto& in = x.dims();
  std::vector<std::int64_t> in_stride(sz(r), 1);
  for (int i = r - 2; i >= 0; --i) in_stride[sz(i)] = in_stride[sz(i + 1)] * in[sz(i + 1)];
  Dims out_dims(sz(r));
  for (int i = 0; i < r; ++i) out_dims[sz(i)] = in[sz(perm[sz(i)])];

  auto index = std::make_shared<std::vector<std::int64_t>>(sz(x.numel()));
  std::vector<std::int64_t> counter(sz(r), 0);
  for (std::int64_t flat = 0; flat < x.numel(); ++flat) {
    std::int64_t src = 0;
    for (int i = 0; i < r; ++i) src += counter[sz(i)] * in_stride[sz(perm[sz(i)])];
    (*index)[sz(flat)] = src;
    for (int i = r - 1; i >= 0; --i) {
      if (++counter[sz(i)] < out_dims[sz(i)]) break;
      counter[sz(i)] = 0;
    }
  }
  return gather(x, std::move(index), std::move(out_dims));
}

Tensor gather(const Tensor& x, GatherIndex index, Dims out_dims) {
  if (!index || static_cast<std::int64_t>(index->size()) != numel(out_dims)) {
    throw std::invalid_argument("gather: index size does not match output dims " + dims_to_string(out_dims));
  }
  const auto xd = x.data();
  std::vector<double> out(index->size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto src = (*index)[i];
    if (src >= x.numel()) throw std::invalid_argument("gather: index out of range");
    out[i] = src < 0 ? 0.0 : xd[sz(src)];
  }
  auto* xn = x.node();
  return Tensor::make_result(std::move(out_dims), std::move(out), {x}, [xn, index](detail::Node& self) {
    xn->ensure_grad();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      const auto src = (*index)[i];
      if (src >= 0) xn->grad[sz(src)] += self.grad[i];
    }
  });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v;
  auto* xn = x.node();
  return Tensor::make_result({}, {total}, {x}, [xn](detail::Node& self) {
    xn->ensure_grad();
    for (auto& g : xn->grad) g += self.grad[0];
  });
}

Tensor mean(const Tensor& x, int axis) {
  axis = normalize_axis(axis, x.rank());
  const auto s = split_axis(x.dims(), axis);
  Dims out_dims;
  for (int i = 0; i < x.rank(); ++i) {
    if (i != axis) out_dims.push_back(x.dims()[sz(i)]);
  }
  const auto xd = x.data();
  std::vector<double> out(sz(s.outer * s.inner), 0.0);
  const double inv = 1.0 / static_cast<double>(s.len);
  for (std::int64_t o = 0; o < s.outer; ++o) {
    for (std::int64_t j = 0; j < s.len; ++j) {
      for (std::int64_t in = 0; in < s.inner; ++in) out[sz(o * s.inner + in)] += xd[sz((o * s.len + j) * s.inner + in)];
    }
  }
  for (auto& v : out) v *= inv;
  auto* xn = x.node();
  return Tensor::make_result(std::move(out_dims), std::move(out), {x}, [xn, s, inv](detail::Node& self) {
    xn->ensure_grad();
    for (std::int64_t o = 0; o < s.outer; ++o) {
      for (std::int64_t j = 0; j < s.len; ++j) {
        for (std::int64_t in = 0; in < s.inner; ++in) {
          xn->grad[sz((o * s.len + j) * s.inner + in)] += inv * self.grad[sz(o * s.inner + in)];
        }
      }
    }
  });
}

Tensor squared_l2(const Tensor& x) {
  double total = 0.0;
  for (double v : x.data()) total += v * v;
  auto* xn = x.node();
  return Tensor::make_result({}, {total}, {x}, [xn](detail::Node& self) {
    xn->ensure_grad();
    for (std::size_t i = 0; i < xn->grad.size(); ++i) xn->grad[i] += 2.0 * xn->data[i] * self.grad[0];
  });
}

namespace {

// Row-wise log-sum-exp and softmax of a [B, C] logits buffer.
void row_softmax(std::span<const double> logits, std::int64_t b, std::int64_t c, std::vector<double>& probs,
                 std::vector<double>& lse) {
  probs.resize(sz(b * c));
  lse.resize(sz(b));
  for (std::int64_t i = 0; i < b; ++i) {
    const double* row = logits.data() + i * c;
    double mx = row[0];
    for (std::int64_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double total = 0.0;
    for (std::int64_t j = 0; j < c; ++j) total += std::exp(row[j] - mx);
    lse[sz(i)] = mx + std::log(total);
    for (std::int64_t j = 0; j < c; ++j) probs[sz(i * c + j)] = std::exp(row[j] - lse[sz(i)]);
  }
}

void check_logits(const Tensor& logits) {
  if (logits.rank() != 2) throw std::invalid_argument("cross_entropy: logits must be [batch, classes]");
}

}  // namespace

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets) {
  std::vector<double> ones(targets.size(), 1.0);
  return cross_entropy(logits, targets, ones);
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets, std::span<const double> weights) {
  check_logits(logits);
  const std::int64_t b = logits.dim(0), c = logits.dim(1);
  if (static_cast<std::int64_t>(targets.size()) != b || static_cast<std::int64_t>(weights.size()) != b) {
    throw std::invalid_argument("cross_entropy: target count does not match batch");
  }
  for (int t : targets) {
    if (t < 0 || t >= c) throw std::invalid_argument("cross_entropy: class index " + std::to_string(t) + " out of range");
  }
  auto probs = std::make_shared<std::vector<double>>();
  std::vector<double> lse;
  row_softmax(logits.data(), b, c, *probs, lse);
  double total = 0.0;
  for (std::int64_t i = 0; i < b; ++i) {
    if (weights[sz(i)] != 0.0) total += weights[sz(i)] * (lse[sz(i)] - logits.data()[sz(i * c + targets[sz(i)])]);
  }
  total /= static_cast<double>(b);
  auto tgt = std::make_shared<std::vector<int>>(targets.begin(), targets.end());
  auto w = std::make_shared<std::vector<double>>(weights.begin(), weights.end());
  auto* ln = logits.node();
  return Tensor::make_result({}, {total}, {logits}, [ln, probs, tgt, w, b, c](detail::Node& self) {
    ln->ensure_grad();
    const double g = self.grad[0] / static_cast<double>(b);
    for (std::int64_t i = 0; i < b; ++i) {
      const double wi = (*w)[sz(i)];
      if (wi == 0.0) continue;
      for (std::int64_t j = 0; j < c; ++j) {
        const double onehot = j == (*tgt)[sz(i)] ? 1.0 : 0.0;
        ln->grad[sz(i * c + j)] += g * wi * ((*probs)[sz(i * c + j)] - onehot);
      }
    }
  });
}

Tensor cross_entropy(const Tensor& logits, const Tensor& soft_targets) {
  check_logits(logits);
  if (soft_targets.dims() != logits.dims()) throw std::invalid_argument("cross_entropy: soft target shape mismatch");
  const std::int64_t b = logits.dim(0), c = logits.dim(1);
  auto probs = std::make_shared<std::vector<double>>();
  std::vector<double> lse;
  row_softmax(logits.data(), b, c, *probs, lse);
  const auto p = soft_targets.data();
  double total = 0.0;
  for (std::int64_t i = 0; i < b; ++i) {
    for (std::int64_t j = 0; j < c; ++j) {
      total += p[sz(i * c + j)] * (lse[sz(i)] - logits.data()[sz(i * c + j)]);
    }
  }
  total /= static_cast<double>(b);
  auto target = std::make_shared<std::vector<double>>(p.begin(), p.end());
  auto* ln = logits.node();
  return Tensor::make_result({}, {total}, {logits}, [ln, probs, target, b, c](detail::Node& self) {
    ln->ensure_grad();
    const double g = self.grad[0] / static_cast<double>(b);
    for (std::int64_t i = 0; i < b; ++i) {
      double mass = 0.0;
      for (std::int64_t j = 0; j < c; ++j) mass += (*target)[sz(i * c + j)];
      for (std::int64_t j = 0; j < c; ++j) {
        ln->grad[sz(i * c + j)] += g * (mass * (*probs)[sz(i * c + j)] - (*target)[sz(i * c + j)]);
      }
    }
  });
}

}  // namespace svf
