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
#include "svf/rng.hpp"

namespace svf {

enum class MaskStrategy { Tube, Rand, Frame };

/// Binary mask over the token grid. A one selects the first clip's token.
struct TokenMask {
  int h = 0;  // tokens per column
  int w = 0;  // tokens per row
  int t = 0;  // frames
  std::vector<std::uint8_t> bits;  // frame-major, then row-major
  double nominal_lambda = 0.0;
  double realized_lambda = 0.0;

  std::uint8_t bit(int ti, int y, int x) const {
    return bits[(static_cast<std::size_t>(ti) * h + y) * w + x];
  }
  std::int64_t ones() const;
  std::int64_t ones_in_frame(int ti) const;
};

/// Beta(alpha, alpha) draw.
double sample_lambda(double alpha, Rng& rng);

/// tube: round(lambda*h*w) sites replicated over all frames;
/// rand: round(lambda*h*w*t) tokens anywhere; frame: round(lambda*t) whole frames.
TokenMask gen_mask(MaskStrategy strategy, int h, int w, int t, double lambda, Rng& rng);

/// Broadcasts each token bit over its patch x patch pixel block and all
/// channels: out = a where bit = 1, b elsewhere.
Clip mix_clips(const Clip& a, const Clip& b, const TokenMask& mask, int patch);

/// lambda * za + (1 - lambda) * zb for probability vectors.
std::vector<double> mix_labels(std::span<const double> za, std::span<const double> zb, double lambda);

enum class PixelMixKind { Mixup, CutMix };

struct PixelMixResult {
  Clip clip;
  double lambda_eff = 0.0;
};

/// Pixel-level baselines. Mixup blends whole clips; CutMix pastes one
/// rectangle of b (area (1 - lambda) * H * W, same place in every frame) into a.
PixelMixResult pixel_mix_baseline(PixelMixKind kind, const Clip& a, const Clip& b, double lambda, Rng& rng);

}  // namespace svf
