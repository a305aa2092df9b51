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

#include "svf/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svf {

WeakParams draw_weak_params(const ClipShape& shape, Rng& rng) {
  WeakParams p;
  p.flip = rng.bernoulli(0.5);
  p.scale = rng.uniform(1.0, 1.25);
  const int sh = static_cast<int>(std::lround(shape.height * p.scale));
  const int sw = static_cast<int>(std::lround(shape.width * p.scale));
  p.offset_y = static_cast<int>(rng.uniform_int(0, sh - shape.height));
  p.offset_x = static_cast<int>(rng.uniform_int(0, sw - shape.width));
  return p;
}

Clip apply_weak(const Clip& clip, const WeakParams& params) {
  if (params.scale < 1.0) throw std::invalid_argument("weak augmentation scale must be >= 1");
  const int h = clip.height(), w = clip.width(), c = clip.channels();
  const int sh = static_cast<int>(std::lround(h * params.scale));
  const int sw = static_cast<int>(std::lround(w * params.scale));
  if (params.offset_y < 0 || params.offset_x < 0 || params.offset_y > sh - h || params.offset_x > sw - w) {
    throw std::invalid_argument("weak augmentation crop offset out of range");
  }
  const double ry = static_cast<double>(h) / sh;
  const double rx = static_cast<double>(w) / sw;

  // Per-axis source coordinates (half-pixel centres), shared by all frames.
  struct Tap {
    int i0, i1;
    double f;
  };
  auto taps = [](int n_out, int offset, double ratio, int n_in) {
    std::vector<Tap> out(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
      const double src = std::clamp((o + offset + 0.5) * ratio - 0.5, 0.0, static_cast<double>(n_in - 1));
      const int i0 = static_cast<int>(std::floor(src));
      const int i1 = std::min(i0 + 1, n_in - 1);
      out[static_cast<std::size_t>(o)] = {i0, i1, src - i0};
    }
    return out;
  };
  const auto ty = taps(h, params.offset_y, ry, h);
  const auto tx = taps(w, params.offset_x, rx, w);

  Clip out(clip.shape());
  for (int t = 0; t < clip.frames(); ++t) {
    for (int y = 0; y < h; ++y) {
      const auto& a = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < w; ++x) {
        const auto& b = tx[static_cast<std::size_t>(params.flip ? w - 1 - x : x)];
        for (int ch = 0; ch < c; ++ch) {
          float v;
          if (a.f == 0.0 && b.f == 0.0) {
            v = clip.at(t, a.i0, b.i0, ch);
          } else {
            const double top = clip.at(t, a.i0, b.i0, ch) * (1.0 - b.f) + clip.at(t, a.i0, b.i1, ch) * b.f;
            const double bot = clip.at(t, a.i1, b.i0, ch) * (1.0 - b.f) + clip.at(t, a.i1, b.i1, ch) * b.f;
            v = static_cast<float>(top * (1.0 - a.f) + bot * a.f);
          }
          out.at(t, y, x, ch) = v;
        }
      }
    }
  }
  clamp_unit(out);
  return out;
}

Clip weak_augment(const Clip& clip, Rng& rng) { return apply_weak(clip, draw_weak_params(clip.shape(), rng)); }

std::vector<StrongOp> draw_strong_ops(const ClipShape& shape, const StrongPool& pool, Rng& rng) {
  if (pool.ops.empty() || pool.ops_per_clip <= 0) return {};
  std::vector<StrongOpKind> kinds = pool.ops;
  const auto n = std::min<std::size_t>(kinds.size(), static_cast<std::size_t>(pool.ops_per_clip));
  const auto picks = rng.sample_without_replacement(static_cast<std::int64_t>(kinds.size()), static_cast<std::int64_t>(n));
  std::vector<StrongOp> ops;
  for (auto idx : picks) {
    StrongOp op;
    op.kind = kinds[static_cast<std::size_t>(idx)];
    auto draw = [&rng](const Range& r) { return r.lo == r.hi ? r.lo : rng.uniform(r.lo, r.hi); };
    switch (op.kind) {
      case StrongOpKind::Brightness: op.amount = draw(pool.brightness); break;
      case StrongOpKind::Contrast: op.amount = draw(pool.contrast); break;
      case StrongOpKind::Noise: op.amount = draw(pool.noise); break;
      case StrongOpKind::PixelDropout: op.amount = draw(pool.dropout); break;
      case StrongOpKind::Cutout: {
        op.amount = draw(pool.cutout);
        const double area = op.amount * shape.height * shape.width;
        if (area >= 1.0) {
          const double aspect = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
          op.rect_h = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 1, shape.height);
          op.rect_w = std::clamp(static_cast<int>(std::floor(area / op.rect_h)), 1, shape.width);
          if (op.rect_h * op.rect_w > area) op.rect_h = std::max(1, static_cast<int>(std::floor(area / op.rect_w)));
          op.rect_y = static_cast<int>(rng.uniform_int(0, shape.height - op.rect_h));
          op.rect_x = static_cast<int>(rng.uniform_int(0, shape.width - op.rect_w));
        }
        break;
      }
    }
    ops.push_back(op);
  }
  return ops;
}

Clip apply_strong_ops(const Clip& clip, std::span<const StrongOp> ops, Rng& rng) {
  Clip out = clip;
  const auto frame_size = out.frame_size();
  for (const auto& op : ops) {
    auto px = out.pixels();
    switch (op.kind) {
      case StrongOpKind::Brightness:
        if (op.amount != 0.0) {
          for (auto& v : px) v = static_cast<float>(v + op.amount);
        }
        break;
      case StrongOpKind::Contrast:
        if (op.amount != 1.0) {
          double m = 0.0;
          for (float v : px) m += v;
          m /= static_cast<double>(px.size());
          for (auto& v : px) v = static_cast<float>((v - m) * op.amount + m);
        }
        break;
      case StrongOpKind::Noise:
        if (op.amount > 0.0) {
          for (auto& v : px) v = static_cast<float>(v + rng.normal(0.0, op.amount));
        }
        break;
      case StrongOpKind::PixelDropout:
        if (op.amount > 0.0) {
          std::vector<bool> drop(frame_size);
          for (std::size_t i = 0; i < frame_size; ++i) drop[i] = rng.bernoulli(op.amount);
          for (std::size_t i = 0; i < px.size(); ++i) {
            if (drop[i % frame_size]) px[i] = 0.0f;
          }
        }
        break;
      case StrongOpKind::Cutout:
        for (int t = 0; t < out.frames(); ++t) {
          for (int y = op.rect_y; y < op.rect_y + op.rect_h; ++y) {
            for (int x = op.rect_x; x < op.rect_x + op.rect_w; ++x) {
              for (int c = 0; c < out.channels(); ++c) out.at(t, y, x, c) = 0.0f;
            }
          }
        }
        break;
    }
    clamp_unit(out);
  }
  return out;
}

Clip strong_spatial_augment(const Clip& clip, Rng& rng, const StrongPool& pool) {
  const auto ops = draw_strong_ops(clip.shape(), pool, rng);
  return apply_strong_ops(clip, ops, rng);
}

bool WarpPlan::valid() const {
  if (frames <= 0 || static_cast<int>(source.size()) != frames || kept.empty()) return false;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 0 || kept[i] >= frames) return false;
    if (i > 0 && kept[i] <= kept[i - 1]) return false;
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (i > 0 && source[i] < source[i - 1]) return false;
    if (!std::binary_search(kept.begin(), kept.end(), source[i])) return false;
  }
  for (int k : kept) {
    if (std::find(source.begin(), source.end(), k) == source.end()) return false;
  }
  return true;
}

bool WarpPlan::is_identity() const {
  for (int i = 0; i < static_cast<int>(source.size()); ++i) {
    if (source[static_cast<std::size_t>(i)] != i) return false;
  }
  return true;
}

std::vector<int> warp_selection_sizes(int frames) {
  if (frames < 1) throw std::invalid_argument("temporal warp needs at least one frame");
  if (frames % 4 == 0) return {frames / 4, frames / 2, frames};
  return {1, (frames + 1) / 2, frames};
}

WarpPlan plan_temporal_warp(int frames, Rng& rng) {
  const auto sizes = warp_selection_sizes(frames);
  const int k = sizes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(sizes.size()) - 1))];
  const auto picked = rng.sample_without_replacement(frames, k);
  std::vector<int> kept(picked.begin(), picked.end());
  std::sort(kept.begin(), kept.end());
  return fill_temporal_warp(frames, std::move(kept), rng);
}

WarpPlan fill_temporal_warp(int frames, std::vector<int> kept, Rng& rng) {
  std::sort(kept.begin(), kept.end());
  if (kept.empty() || kept.front() < 0 || kept.back() >= frames ||
      std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw std::invalid_argument("temporal warp: kept frames must be distinct indices in range");
  }
  WarpPlan plan;
  plan.frames = frames;
  plan.source.assign(static_cast<std::size_t>(frames), kept.front());
  for (int k : kept) plan.source[static_cast<std::size_t>(k)] = k;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
    const int l = kept[i], r = kept[i + 1];
    const int gap = r - l - 1;
    if (gap == 0) continue;
    const int cut = static_cast<int>(rng.uniform_int(0, gap));
    for (int j = 0; j < gap; ++j) plan.source[static_cast<std::size_t>(l + 1 + j)] = j < cut ? l : r;
  }
  for (int i = kept.back() + 1; i < frames; ++i) plan.source[static_cast<std::size_t>(i)] = kept.back();
  plan.kept = std::move(kept);
  return plan;
}

Clip apply_temporal_warp(const Clip& clip, const WarpPlan& plan) {
  if (plan.frames != clip.frames() || static_cast<int>(plan.source.size()) != clip.frames()) {
    throw std::invalid_argument("temporal warp plan length does not match clip");
  }
  Clip out(clip.shape());
  for (int t = 0; t < clip.frames(); ++t) {
    const int src = plan.source[static_cast<std::size_t>(t)];
    if (src < 0 || src >= clip.frames()) throw std::invalid_argument("temporal warp source out of range");
    std::copy_n(clip.frame(src).begin(), clip.frame_size(), out.frame(t).begin());
  }
  return out;
}

}  // namespace svf
