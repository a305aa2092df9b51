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

#include <span>
#include <vector>

#include "svf/clip.hpp"
#include "svf/rng.hpp"

namespace svf {

// ---- weak spatial augmentation ----------------------------------------------

/// One draw of the weak augmentation; the same decision applies to every frame.
struct WeakParams {
  bool flip = false;
  double scale = 1.0;  // in [1.0, 1.25]
  int offset_y = 0;    // crop offset inside the rescaled frame
  int offset_x = 0;
};

WeakParams draw_weak_params(const ClipShape& shape, Rng& rng);
/// Horizontal flip, bilinear rescale by `scale`, then crop back to H x W.
Clip apply_weak(const Clip& clip, const WeakParams& params);
Clip weak_augment(const Clip& clip, Rng& rng);

// ---- strong spatial augmentation --------------------------------------------

enum class StrongOpKind { Brightness, Contrast, Noise, PixelDropout, Cutout };

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Fixed operation pool; every op draws one parameter uniformly from its range.
struct StrongPool {
  std::vector<StrongOpKind> ops{StrongOpKind::Brightness, StrongOpKind::Contrast, StrongOpKind::Noise,
                                StrongOpKind::PixelDropout, StrongOpKind::Cutout};
  int ops_per_clip = 2;
  Range brightness{-0.3, 0.3};  // additive shift
  Range contrast{0.5, 1.5};     // scale about the clip mean
  Range noise{0.0, 0.1};        // Gaussian sigma
  Range dropout{0.0, 0.2};      // per-pixel drop probability
  Range cutout{0.0, 0.25};      // rectangle area as a fraction of the frame
};

struct StrongOp {
  StrongOpKind kind = StrongOpKind::Brightness;
  double amount = 0.0;
  int rect_y = 0, rect_x = 0, rect_h = 0, rect_w = 0;  // cutout only
};

std::vector<StrongOp> draw_strong_ops(const ClipShape& shape, const StrongPool& pool, Rng& rng);
/// Applies ops in order with identical parameters on every frame (noise and
/// dropout masks are drawn from `rng`), then clamps to [0, 1].
Clip apply_strong_ops(const Clip& clip, std::span<const StrongOp> ops, Rng& rng);
Clip strong_spatial_augment(const Clip& clip, Rng& rng, const StrongPool& pool = {});

// ---- temporal warping -------------------------------------------------------

/// Output frame i copies input frame source[i]; `kept` are the visible frames.
struct WarpPlan {
  int frames = 0;
  std::vector<int> kept;
  std::vector<int> source;

  /// source nondecreasing, onto kept, kept sorted and in range.
  bool valid() const;
  bool is_identity() const;
};

/// Candidate counts of kept frames: {T/4, T/2, T}, or {1, ceil(T/2), T}
/// when T is not a multiple of four.
std::vector<int> warp_selection_sizes(int frames);

WarpPlan plan_temporal_warp(int frames, Rng& rng);
/// Fills the gaps around a fixed kept set. Each gap between kept frames
/// l < r is split at a uniformly drawn cut: positions before the cut copy l,
/// the rest copy r. Leading positions copy the first kept frame, trailing
/// positions the last.
WarpPlan fill_temporal_warp(int frames, std::vector<int> kept, Rng& rng);
Clip apply_temporal_warp(const Clip& clip, const WarpPlan& plan);

}  // namespace svf
