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
#include <span>
#include <string>
#include <vector>

#include "svf/clip.hpp"
#include "svf/params.hpp"
#include "svf/rng.hpp"
#include "svf/tensor.hpp"

namespace svf {

/// Shape of a divided space-time attention classifier.
struct ModelConfig {
  int frames = 8;
  int height = 16;
  int width = 16;
  int channels = 1;
  int patch = 4;
  int dim = 32;
  int heads = 2;
  int blocks = 2;
  int n_classes = 8;
  double drop_rate = 0.1;

  int grid_h() const { return height / patch; }
  int grid_w() const { return width / patch; }
  int sites() const { return grid_h() * grid_w(); }
  int patch_numel() const { return patch * patch * channels; }
  ClipShape clip_shape() const { return {frames, height, width, channels}; }

  /// Throws std::invalid_argument when the config is inconsistent.
  void validate() const;

  static ModelConfig s_toy();
  static ModelConfig b_toy();
};

struct ModelState {
  ModelConfig config;
  ParamSet params;

  ModelState clone() const { return ModelState{config, params.clone()}; }
};

/// Truncated-normal (std 0.02, cut at two std) weights, zero biases, unit
/// norm gains and a zero-initialized classifier head.
ModelState init_model(const ModelConfig& config, std::uint64_t seed);

/// Test hooks that bypass parts of every block.
struct ForwardOptions {
  bool skip_spatial = false;
  bool skip_mlp = false;
};

/// Patch tokens plus spatial and temporal position embeddings, [B, T*H'*W', dim].
/// Token order is frame-major, then row-major over the patch grid.
Tensor tokenize(const ModelState& state, std::span<const Clip> clips);

/// Token sequence after every block, [B, 1 + T*H'*W', dim]; row 0 is the class token.
Tensor encode(const ModelState& state, std::span<const Clip> clips, bool train_mode, Rng& rng,
              const ForwardOptions& options = {});

/// Logits [B, n_classes]. Dropout draws from `rng` only when train_mode is set.
Tensor forward(const ModelState& state, std::span<const Clip> clips, bool train_mode, Rng& rng);

/// Eval-mode softmax probabilities with gradient recording suppressed, [B, n_classes].
std::vector<std::vector<double>> predict_probs(const ModelState& state, std::span<const Clip> clips);

}  // namespace svf
