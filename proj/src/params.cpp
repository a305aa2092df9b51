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

#include "svf/params.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace svf {

ParamSet ParamSet::clone() const {
  ParamSet out;
  for (const auto& e : entries_) {
    auto& t = out.add(e.name, e.value.dims(), {e.value.data().begin(), e.value.data().end()});
    t.set_requires_grad(e.value.requires_grad());
    out.entries_.back().momentum = e.momentum;
  }
  return out;
}

Tensor& ParamSet::add(const std::string& name, Dims dims, std::vector<double> values) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  for (auto& v : values) v = round_to_float(v);
  auto t = Tensor::from_vector(std::move(dims), std::move(values), true);
  t.zero_grad();
  const auto n = static_cast<std::size_t>(t.numel());
  index_.emplace(name, entries_.size());
  entries_.push_back(Entry{name, std::move(t), std::vector<double>(n, 0.0)});
  return entries_.back().value;
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return entries_[it->second].value;
}

const Tensor& ParamSet::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return entries_[it->second].value;
}

std::int64_t ParamSet::total_numel() const {
  std::int64_t n = 0;
  for (const auto& e : entries_) n += e.value.numel();
  return n;
}

void ParamSet::zero_grad() {
  for (auto& e : entries_) e.value.zero_grad();
}

void ParamSet::set_requires_grad(bool on) {
  for (auto& e : entries_) e.value.set_requires_grad(on);
}

void ParamSet::check_compatible(const ParamSet& other) const {
  if (entries_.size() != other.entries_.size()) {
    throw StructuralError("parameter count mismatch: " + std::to_string(entries_.size()) + " vs " +
                          std::to_string(other.entries_.size()));
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name) throw StructuralError("parameter name mismatch: " + a.name + " vs " + b.name);
    if (a.value.dims() != b.value.dims()) {
      throw StructuralError("parameter shape mismatch for " + a.name + ": " + dims_to_string(a.value.dims()) +
                            " vs " + dims_to_string(b.value.dims()));
    }
  }
}

void ParamSet::copy_values_from(const ParamSet& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto dst = entries_[i].value.mutable_data();
    auto src = other.entries_[i].value.data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

bool ParamSet::all_finite() const {
  for (const auto& e : entries_) {
    for (double v : e.value.data()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

std::uint64_t ParamSet::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& e : entries_) {
    mix(e.name.data(), e.name.size());
    for (auto d : e.value.dims()) mix(&d, sizeof d);
    for (double v : e.value.data()) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      mix(&bits, sizeof bits);
    }
  }
  return h;
}

void sgd_step(ParamSet& params, const SgdOptions& opts) {
  if (!(opts.lr > 0.0)) throw std::invalid_argument("sgd_step: lr must be positive");
  for (auto& e : params.entries()) {
    auto p = e.value.mutable_data();
    auto g = e.value.mutable_grad();
    for (std::size_t i = 0; i < p.size(); ++i) {
      double& v = e.momentum[i];
      v = opts.momentum * v + g[i] + opts.weight_decay * p[i];
      p[i] = round_to_float(p[i] - opts.lr * v);
    }
    e.value.zero_grad();
  }
}

}  // namespace svf
