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
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace svf {

using Dims = std::vector<std::int64_t>;

std::int64_t numel(const Dims& dims);
std::string dims_to_string(const Dims& dims);

namespace detail {

// One value in the computation graph. Leaves (parameters, inputs) have no
// parents; op results hold their inputs alive through `parents`.
struct Node {
  Dims dims;
  std::vector<double> data;
  std::vector<double> grad;  // empty until a gradient flows here
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

/// Dense row-major tensor of doubles with optional reverse-mode gradient.
///
/// A Tensor is a shared handle: copies alias the same storage. Values are
/// immutable once produced by an op; only leaves are written in place (by the
/// optimizer and by EMA updates).
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Dims dims, bool requires_grad = false);
  static Tensor full(Dims dims, double value, bool requires_grad = false);
  static Tensor from_vector(Dims dims, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value);

  bool defined() const { return node_ != nullptr; }
  const Dims& dims() const { return node_->dims; }
  int rank() const { return static_cast<int>(node_->dims.size()); }
  std::int64_t dim(int axis) const;
  std::int64_t numel() const { return static_cast<std::int64_t>(node_->data.size()); }

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  double item() const;
  double operator[](std::int64_t i) const { return node_->data[static_cast<std::size_t>(i)]; }

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return !node_->grad.empty(); }
  std::span<const double> grad() const { return node_->grad; }
  std::span<double> mutable_grad();
  void zero_grad();

  /// Value copy with no graph history.
  Tensor detach() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& shared_node() const { return node_; }

  /// Builds an op result. The result requires grad when grad mode is on and
  /// any parent requires grad; otherwise parents and backward_fn are dropped.
  static Tensor make_result(Dims dims, std::vector<double> values,
                            std::initializer_list<Tensor> parents,
                            std::function<void(detail::Node&)> backward_fn);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

bool grad_enabled();

// Disables graph recording on this thread for its lifetime (stop-gradient).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

/// Reverse-mode sweep from a scalar loss. Gradients accumulate (+=) into
/// every reachable tensor that requires grad.
void backward(const Tensor& loss);

}  // namespace svf
