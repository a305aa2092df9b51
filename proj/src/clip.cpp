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

#include "svf/clip.hpp"

#include <algorithm>
#include <stdexcept>

namespace svf {

Clip::Clip(ClipShape shape, float fill) : shape_(shape) {
  if (shape.frames <= 0 || shape.height <= 0 || shape.width <= 0 || shape.channels <= 0) {
    throw std::invalid_argument("clip dims must be positive");
  }
  pixels_.assign(static_cast<std::size_t>(shape.numel()), fill);
}

Clip::Clip(ClipShape shape, std::vector<float> pixels) : Clip(shape) {
  if (pixels.size() != pixels_.size()) throw std::invalid_argument("clip pixel count does not match shape");
  pixels_ = std::move(pixels);
}

std::span<const float> Clip::frame(int t) const {
  return std::span<const float>(pixels_).subspan(static_cast<std::size_t>(t) * frame_size(), frame_size());
}

std::span<float> Clip::frame(int t) {
  return std::span<float>(pixels_).subspan(static_cast<std::size_t>(t) * frame_size(), frame_size());
}

Clip Clip::window(int start, int count) const {
  if (start < 0 || count <= 0 || start + count > shape_.frames) throw std::invalid_argument("clip window out of range");
  ClipShape s = shape_;
  s.frames = count;
  const auto first = pixels_.begin() + static_cast<std::ptrdiff_t>(start * frame_size());
  return Clip(s, std::vector<float>(first, first + static_cast<std::ptrdiff_t>(count * frame_size())));
}

void clamp_unit(Clip& clip) {
  for (auto& v : clip.pixels()) v = std::clamp(v, 0.0f, 1.0f);
}

bool in_unit_range(const Clip& clip) {
  return std::all_of(clip.pixels().begin(), clip.pixels().end(), [](float v) { return v >= 0.0f && v <= 1.0f; });
}

}  // namespace svf
