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

#include "svf/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "binary_io.hpp"
#include "svf/rng.hpp"

namespace svf {

namespace {

constexpr char kMagic[4] = {'S', 'V', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr int kNumClasses = 8;

int wrap(int v, int n) { return ((v % n) + n) % n; }

void draw_square(Clip& clip, int t, int y0, int x0, int side, float intensity) {
  const int n = clip.height();
  for (int dy = 0; dy < side; ++dy) {
    for (int dx = 0; dx < side; ++dx) clip.at(t, wrap(y0 + dy, n), wrap(x0 + dx, n)) = intensity;
  }
}

}  // namespace

Clip render_motion_clip(MotionClass cls, std::uint64_t stream_seed, const GeneratorOptions& o) {
  if (o.frames < 1 || o.size < 1 || o.min_side < 1 || o.max_side < o.min_side) {
    throw std::invalid_argument("invalid generator options");
  }
  Rng rng(stream_seed);
  const int side = static_cast<int>(rng.uniform_int(o.min_side, o.max_side));
  const int y0 = static_cast<int>(rng.uniform_int(0, o.size - 1));
  const int x0 = static_cast<int>(rng.uniform_int(0, o.size - 1));
  const auto intensity = static_cast<float>(rng.uniform(o.min_intensity, o.max_intensity));

  Clip clip(ClipShape{o.frames, o.size, o.size, 1});
  for (int t = 0; t < o.frames; ++t) {
    int y = y0, x = x0, s = side;
    bool visible = true;
    switch (cls) {
      case MotionClass::ShiftLeft: x = x0 - t; break;
      case MotionClass::ShiftRight: x = x0 + t; break;
      case MotionClass::ShiftUp: y = y0 - t; break;
      case MotionClass::ShiftDown: y = y0 + t; break;
      case MotionClass::Grow: s = std::clamp(side + t / 2, 2, 8); break;
      case MotionClass::Shrink: s = std::clamp(side - t / 2, 2, 8); break;
      case MotionClass::Blink: visible = t % 2 == 0; break;
      case MotionClass::Static: break;
    }
    if (visible) draw_square(clip, t, y, x, s, intensity);
  }
  if (o.noise_max > 0.0) {
    for (auto& v : clip.pixels()) v = static_cast<float>(v + rng.uniform(0.0, o.noise_max));
  }
  clamp_unit(clip);
  return clip;
}

std::vector<VideoSample> generate_dataset(int n_per_class, std::uint64_t seed, const GeneratorOptions& options) {
  if (n_per_class < 1) throw std::invalid_argument("generate_dataset: n_per_class must be >= 1");
  const auto total = static_cast<std::uint64_t>(n_per_class) * kNumClasses;
  std::vector<VideoSample> out;
  out.reserve(static_cast<std::size_t>(total));
  for (std::uint64_t id = 0; id < total; ++id) {
    const int label = static_cast<int>(id % kNumClasses);
    out.push_back({render_motion_clip(static_cast<MotionClass>(label), derive_seed(seed, id), options), label, id});
  }
  return out;
}

DatasetMeta make_meta(const std::vector<VideoSample>& samples, std::uint64_t seed, int n_classes) {
  DatasetMeta meta;
  meta.n_samples = static_cast<std::uint32_t>(samples.size());
  if (!samples.empty()) meta.shape = samples.front().clip.shape();
  meta.n_classes = static_cast<std::uint16_t>(n_classes);
  meta.seed = seed;
  return meta;
}

namespace {

// Per-class index lists in dataset order (labeled samples only).
std::map<int, std::vector<std::size_t>> by_class(const std::vector<VideoSample>& dataset) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].label != kUnlabeled) groups[dataset[i].label].push_back(i);
  }
  return groups;
}

// Marks round(fraction * count) members of every class, chosen by `seed`.
std::vector<bool> choose_per_class(const std::vector<VideoSample>& dataset, double fraction, std::uint64_t seed,
                                   bool require_one) {
  Rng rng(seed);
  std::vector<bool> chosen(dataset.size(), false);
  for (auto& [label, members] : by_class(dataset)) {
    const auto k = static_cast<std::size_t>(std::lround(fraction * static_cast<double>(members.size())));
    if (require_one && k < 1) {
      throw std::invalid_argument("labeling rate too small: class " + std::to_string(label) + " would keep no labels");
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i = 0; i < std::min(k, members.size()); ++i) chosen[members[i]] = true;
  }
  return chosen;
}

}  // namespace

LabelSplit split_labeled(const std::vector<VideoSample>& dataset, double rate, std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) throw std::invalid_argument("labeling rate must lie in (0, 1]");
  const auto keep = choose_per_class(dataset, rate, seed, true);
  LabelSplit split;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (keep[i]) {
      split.labeled.push_back(dataset[i]);
    } else {
      split.unlabeled.push_back(dataset[i]);
      split.unlabeled.back().label = kUnlabeled;
    }
  }
  return split;
}

std::pair<std::vector<VideoSample>, std::vector<VideoSample>> holdout_split(const std::vector<VideoSample>& dataset,
                                                                           double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("holdout fraction must lie in (0, 1)");
  const auto held = choose_per_class(dataset, fraction, seed, false);
  std::pair<std::vector<VideoSample>, std::vector<VideoSample>> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) (held[i] ? out.second : out.first).push_back(dataset[i]);
  return out;
}

std::string encode_dataset(const DatasetMeta& meta, const std::vector<VideoSample>& samples) {
  if (meta.n_samples != samples.size()) throw std::invalid_argument("dataset meta n_samples does not match payload");
  detail::ByteWriter w;
  w.bytes(kMagic, 4);
  w.u32(kVersion);
  w.u32(meta.n_samples);
  w.u16(static_cast<std::uint16_t>(meta.shape.frames));
  w.u16(static_cast<std::uint16_t>(meta.shape.height));
  w.u16(static_cast<std::uint16_t>(meta.shape.width));
  w.u16(static_cast<std::uint16_t>(meta.shape.channels));
  w.u16(meta.n_classes);
  w.u64(meta.seed);
  for (const auto& s : samples) {
    if (!(s.clip.shape() == meta.shape)) throw std::invalid_argument("sample clip shape does not match dataset meta");
    w.u64(s.sample_id);
    w.i32(s.label);
    for (float v : s.clip.pixels()) w.f32(v);
  }
  return w.take();
}

std::pair<DatasetMeta, std::vector<VideoSample>> decode_dataset(const std::string& bytes) {
  detail::ByteReader r(bytes);
  if (r.bytes(4, "magic") != std::string_view(kMagic, 4)) throw FormatError("bad dataset magic", 0);
  const auto version_at = r.offset();
  if (r.u32("version") != kVersion) throw FormatError("unsupported dataset version", version_at);
  DatasetMeta meta;
  meta.n_samples = r.u32("n_samples");
  const auto shape_at = r.offset();
  meta.shape.frames = r.u16("T");
  meta.shape.height = r.u16("H");
  meta.shape.width = r.u16("W");
  meta.shape.channels = r.u16("C");
  meta.n_classes = r.u16("n_classes");
  meta.seed = r.u64("seed");
  if (meta.shape.frames == 0 || meta.shape.height == 0 || meta.shape.width == 0 || meta.shape.channels == 0) {
    throw FormatError("dataset clip dims must be positive", shape_at);
  }
  if (meta.n_classes > kMotionClassNames.size()) {
    meta.class_names.clear();
    for (int c = 0; c < meta.n_classes; ++c) meta.class_names.push_back("class-" + std::to_string(c));
  } else {
    meta.class_names.resize(meta.n_classes);
  }
  const auto per = static_cast<std::size_t>(meta.shape.numel());
  std::vector<VideoSample> samples;
  samples.reserve(std::min<std::size_t>(meta.n_samples, r.remaining() / (12 + 4 * per) + 1));
  for (std::uint32_t i = 0; i < meta.n_samples; ++i) {
    VideoSample s;
    s.sample_id = r.u64("sample_id");
    const auto label_at = r.offset();
    s.label = r.i32("label");
    if (s.label < kUnlabeled || s.label >= meta.n_classes) throw FormatError("label out of range", label_at);
    r.need(per * 4, "pixels");
    std::vector<float> px(per);
    for (auto& v : px) v = r.f32("pixels");
    s.clip = Clip(meta.shape, std::move(px));
    samples.push_back(std::move(s));
  }
  if (!r.at_end()) throw FormatError("trailing bytes after dataset samples", r.offset());
  return {std::move(meta), std::move(samples)};
}

void save_dataset(const std::string& path, const DatasetMeta& meta, const std::vector<VideoSample>& samples) {
  detail::write_file_atomic(path, encode_dataset(meta, samples));
}

std::pair<DatasetMeta, std::vector<VideoSample>> load_dataset(const std::string& path) {
  return decode_dataset(detail::read_file(path));
}

}  // namespace svf
