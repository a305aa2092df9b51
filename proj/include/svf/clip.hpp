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
#include <vector>

namespace svf {

struct ClipShape {
  int frames = 8;
  int height = 16;
  int width = 16;
  int channels = 1;

  std::int64_t numel() const {
    return static_cast<std::int64_t>(frames) * height * width * channels;
  }
  friend bool operator==(const ClipShape&, const ClipShape&) = default;
};

/// One video sample: frames x height x width x channels, frame-major and
/// row-major with channels innermost. Pixel values live in [0, 1].
class Clip {
 public:
  Clip() = default;
  explicit Clip(ClipShape shape, float fill = 0.0f);
  Clip(ClipShape shape, std::vector<float> pixels);

  const ClipShape& shape() const { return shape_; }
  int frames() const { return shape_.frames; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  int channels() const { return shape_.channels; }

  std::span<const float> pixels() const { return pixels_; }
  std::span<float> pixels() { return pixels_; }

  std::size_t offset(int t, int y, int x, int c = 0) const {
    return ((static_cast<std::size_t>(t) * shape_.height + y) * shape_.width + x) * shape_.channels + c;
  }
  float at(int t, int y, int x, int c = 0) const { return pixels_[offset(t, y, x, c)]; }
  float& at(int t, int y, int x, int c = 0) { return pixels_[offset(t, y, x, c)]; }

  std::span<const float> frame(int t) const;
  std::span<float> frame(int t);
  std::size_t frame_size() const {
    return static_cast<std::size_t>(shape_.height) * shape_.width * shape_.channels;
  }

  /// Frames [start, start + count) as a new clip.
  Clip window(int start, int count) const;

  friend bool operator==(const Clip& a, const Clip& b) { return a.shape_ == b.shape_ && a.pixels_ == b.pixels_; }

 private:
  ClipShape shape_{};
  std::vector<float> pixels_;
};

void clamp_unit(Clip& clip);
bool in_unit_range(const Clip& clip);

}  // namespace svf
