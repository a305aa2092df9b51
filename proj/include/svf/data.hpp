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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "svf/clip.hpp"

namespace svf {

inline constexpr int kUnlabeled = -1;

struct VideoSample {
  Clip clip;
  int label = kUnlabeled;
  std::uint64_t sample_id = 0;

  friend bool operator==(const VideoSample&, const VideoSample&) = default;
};

inline constexpr std::array<const char*, 8> kMotionClassNames = {
    "shift-left", "shift-right", "shift-up", "shift-down", "grow", "shrink", "blink", "static"};

struct DatasetMeta {
  std::uint32_t n_samples = 0;
  ClipShape shape{};
  std::uint16_t n_classes = 8;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names{kMotionClassNames.begin(), kMotionClassNames.end()};

  friend bool operator==(const DatasetMeta&, const DatasetMeta&) = default;
};

/// Knobs of the procedural generator. Defaults produce the standard
/// 8-class, 8 x 16 x 16 x 1 motion dataset.
struct GeneratorOptions {
  int frames = 8;
  int size = 16;           // square toroidal canvas
  int min_side = 3;
  int max_side = 6;
  double noise_max = 0.1;  // additive uniform noise in [0, noise_max]
  double min_intensity = 0.6;
  double max_intensity = 0.9;
};

enum class MotionClass { ShiftLeft, ShiftRight, ShiftUp, ShiftDown, Grow, Shrink, Blink, Static };

/// Renders one sample of `cls` from its own RNG stream.
Clip render_motion_clip(MotionClass cls, std::uint64_t stream_seed, const GeneratorOptions& options = {});

/// n_per_class samples of each of the 8 classes. sample_id i has class i % 8
/// and draws from derive_seed(seed, i), so content does not depend on
/// generation order.
std::vector<VideoSample> generate_dataset(int n_per_class, std::uint64_t seed, const GeneratorOptions& options = {});

DatasetMeta make_meta(const std::vector<VideoSample>& samples, std::uint64_t seed, int n_classes = 8);

struct LabelSplit {
  std::vector<VideoSample> labeled;
  std::vector<VideoSample> unlabeled;  // labels replaced by kUnlabeled
};

/// Keeps round(rate * count) labels per class (chosen by `seed`); the rest
/// become unlabeled. Throws std::invalid_argument when a class would keep none.
LabelSplit split_labeled(const std::vector<VideoSample>& dataset, double rate, std::uint64_t seed);

/// Per-class holdout: round(fraction * count) samples of each class go to
/// the second list. Used to carve a validation set out of one file.
std::pair<std::vector<VideoSample>, std::vector<VideoSample>> holdout_split(const std::vector<VideoSample>& dataset,
                                                                           double fraction, std::uint64_t seed);

// Dataset file layout (little-endian):
//   "SVDS" | version u32 = 1 | n_samples u32 | T, H, W, C u16 | n_classes u16 | seed u64
//   per sample: sample_id u64 | label i32 (-1 = unlabeled) | float32 pixels, frame-major, row-major

std::string encode_dataset(const DatasetMeta& meta, const std::vector<VideoSample>& samples);
std::pair<DatasetMeta, std::vector<VideoSample>> decode_dataset(const std::string& bytes);
void save_dataset(const std::string& path, const DatasetMeta& meta, const std::vector<VideoSample>& samples);
std::pair<DatasetMeta, std::vector<VideoSample>> load_dataset(const std::string& path);

}  // namespace svf
