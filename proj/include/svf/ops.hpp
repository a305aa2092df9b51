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

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "svf/tensor.hpp"

namespace svf {

// Differentiable primitives. Binary elementwise ops broadcast `b` over the
// leading axes of `a`: b.dims() must equal a trailing suffix of a.dims()
// (a rank-0 `b` is a scalar).

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double factor);

/// a: [..., M, K], b: [..., K, N] (same leading dims) or [K, N] shared by
/// every leading index.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor softmax(const Tensor& x, int axis);
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);
Tensor gelu(const Tensor& x);

Tensor reshape(const Tensor& x, Dims dims);
/// General axis permutation.
Tensor transpose(const Tensor& x, std::span<const int> perm);

using GatherIndex = std::shared_ptr<const std::vector<std::int64_t>>;

/// out.flat[i] = x.flat[index[i]], or 0 where index[i] < 0. The backward
/// pass scatter-adds, so repeated indices accumulate.
Tensor gather(const Tensor& x, GatherIndex index, Dims out_dims);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x, int axis);
Tensor squared_l2(const Tensor& x);

/// Mean over the batch of -log softmax(logits)[target]. logits: [B, C].
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets);
/// Per-row weights w_i; result is sum_i w_i * CE_i / B.
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets, std::span<const double> weights);
/// Soft targets [B, C] (treated as constants): mean of -sum_j p_j log q_j.
Tensor cross_entropy(const Tensor& logits, const Tensor& soft_targets);

}  // namespace svf
