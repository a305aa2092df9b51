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
#include <string>
#include <unordered_map>
#include <vector>

#include "svf/errors.hpp"
#include "svf/tensor.hpp"

namespace svf {

/// Named learnable tensors in insertion order, each with an SGD momentum
/// buffer. Values are held in double for compute but are kept representable
/// in float32: every writer (init, optimizer, EMA, load) rounds through float.
class ParamSet {
 public:
  struct Entry {
    std::string name;
    Tensor value;
    std::vector<double> momentum;
  };

  ParamSet() = default;
  ParamSet(const ParamSet&) = delete;
  ParamSet& operator=(const ParamSet&) = delete;
  ParamSet(ParamSet&&) = default;
  ParamSet& operator=(ParamSet&&) = default;

  /// Deep copy (fresh leaves, momentum included).
  ParamSet clone() const;

  Tensor& add(const std::string& name, Dims dims, std::vector<double> values);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  std::size_t size() const { return entries_.size(); }
  std::int64_t total_numel() const;
  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  void zero_grad();
  void set_requires_grad(bool on);
  /// Throws StructuralError unless names, order and shapes agree.
  void check_compatible(const ParamSet& other) const;
  /// Overwrites values (not momentum) from a compatible set.
  void copy_values_from(const ParamSet& other);
  bool all_finite() const;
  /// FNV-1a over names, dims and value bits.
  std::uint64_t fingerprint() const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline double round_to_float(double v) { return static_cast<double>(static_cast<float>(v)); }

struct SgdOptions {
  double lr = 0.005;
  double momentum = 0.9;
  double weight_decay = 0.001;
};

/// v <- momentum*v + grad + weight_decay*param; param <- param - lr*v;
/// then grads are zeroed.
void sgd_step(ParamSet& params, const SgdOptions& opts);

}  // namespace svf
