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

// Helpers shared by the unit tests.

#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "svf/clip.hpp"
#include "svf/model.hpp"
#include "svf/params.hpp"
#include "svf/rng.hpp"
#include "svf/tensor.hpp"

namespace svf::testing {

inline Clip random_clip(const ClipShape& shape, Rng& rng) {
  std::vector<float> px(static_cast<std::size_t>(shape.numel()));
  for (auto& p : px) p = static_cast<float>(rng.uniform());
  return Clip(shape, std::move(px));
}

inline std::vector<Clip> random_clips(const ModelConfig& config, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Clip> out;
  for (int i = 0; i < n; ++i) out.push_back(random_clip(config.clip_shape(), rng));
  return out;
}

inline Tensor random_tensor(const Dims& dims, Rng& rng, double scale = 1.0, bool requires_grad = true) {
  std::vector<double> v(static_cast<std::size_t>(numel(dims)));
  for (auto& x : v) x = rng.normal(0.0, scale);
  return Tensor::from_vector(dims, std::move(v), requires_grad);
}

/// Adds N(0, scale) noise to every parameter, keeping float32 values.
inline void randomize_params(ParamSet& params, std::uint64_t seed, double scale) {
  Rng rng(seed);
  for (auto& e : params.entries()) {
    for (auto& v : e.value.mutable_data()) v = round_to_float(v + rng.normal(0.0, scale));
  }
}

/// Relative error with a floor on the denominator, so entries whose
/// gradient is essentially zero are judged on an absolute scale.
inline double rel_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Central differences of `f` with respect to every entry of `leaf`.
inline std::vector<double> numeric_grad(Tensor& leaf, const std::function<double()>& f, double step) {
  NoGradGuard guard;
  std::vector<double> out(static_cast<std::size_t>(leaf.numel()));
  auto data = leaf.mutable_data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double orig = data[i];
    data[i] = orig + step;
    const double up = f();
    data[i] = orig - step;
    const double down = f();
    data[i] = orig;
    out[i] = (up - down) / (2.0 * step);
  }
  return out;
}

/// Per-test scratch directory under SVF_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("SVF_TEST_TMP");
  std::filesystem::path dir = base != nullptr ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "svf_tests";
  dir /= name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace svf::testing
