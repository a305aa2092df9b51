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

#include "svf/mix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svf {

std::int64_t TokenMask::ones() const { return std::accumulate(bits.begin(), bits.end(), std::int64_t{0}); }

std::int64_t TokenMask::ones_in_frame(int ti) const {
  const auto per = static_cast<std::ptrdiff_t>(h) * w;
  return std::accumulate(bits.begin() + ti * per, bits.begin() + (ti + 1) * per, std::int64_t{0});
}

double sample_lambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_lambda: alpha must be positive");
  return rng.beta(alpha, alpha);
}

TokenMask gen_mask(MaskStrategy strategy, int h, int w, int t, double lambda, Rng& rng) {
  if (h < 1 || w < 1 || t < 1) throw std::invalid_argument("gen_mask: grid dims must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("gen_mask: lambda must lie in [0, 1]");
  TokenMask m{h, w, t, std::vector<std::uint8_t>(static_cast<std::size_t>(h) * w * t, 0), lambda, 0.0};
  const std::int64_t sites = static_cast<std::int64_t>(h) * w;
  switch (strategy) {
    case MaskStrategy::Tube: {
      const auto k = static_cast<std::int64_t>(std::lround(lambda * static_cast<double>(sites)));
      for (auto s : rng.sample_without_replacement(sites, k)) {
        for (int ti = 0; ti < t; ++ti) m.bits[static_cast<std::size_t>(ti * sites + s)] = 1;
      }
      break;
    }
    case MaskStrategy::Rand: {
      const std::int64_t total = sites * t;
      const auto k = static_cast<std::int64_t>(std::lround(lambda * static_cast<double>(total)));
      for (auto i : rng.sample_without_replacement(total, k)) m.bits[static_cast<std::size_t>(i)] = 1;
      break;
    }
    case MaskStrategy::Frame: {
      const auto k = static_cast<std::int64_t>(std::lround(lambda * t));
      for (auto ti : rng.sample_without_replacement(t, k)) {
        std::fill_n(m.bits.begin() + static_cast<std::ptrdiff_t>(ti * sites), sites, std::uint8_t{1});
      }
      break;
    }
  }
  m.realized_lambda = static_cast<double>(m.ones()) / static_cast<double>(m.bits.size());
  return m;
}

Clip mix_clips(const Clip& a, const Clip& b, const TokenMask& mask, int patch) {
  if (!(a.shape() == b.shape())) throw std::invalid_argument("mix_clips: clip shapes differ");
  if (patch <= 0 || mask.h * patch != a.height() || mask.w * patch != a.width() || mask.t != a.frames()) {
    throw std::invalid_argument("mix_clips: mask grid does not tile the clip");
  }
  Clip out(a.shape());
  for (int t = 0; t < a.frames(); ++t) {
    for (int y = 0; y < a.height(); ++y) {
      for (int x = 0; x < a.width(); ++x) {
        const bool take_a = mask.bit(t, y / patch, x / patch) != 0;
        for (int c = 0; c < a.channels(); ++c) out.at(t, y, x, c) = take_a ? a.at(t, y, x, c) : b.at(t, y, x, c);
      }
    }
  }
  return out;
}

std::vector<double> mix_labels(std::span<const double> za, std::span<const double> zb, double lambda) {
  if (za.size() != zb.size() || za.empty()) throw std::invalid_argument("mix_labels: label vectors differ in length");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mix_labels: lambda must lie in [0, 1]");
  auto check = [](std::span<const double> z) {
    double s = 0.0;
    for (double v : z) {
      if (v < 0.0) throw std::invalid_argument("mix_labels: negative probability");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-6) throw std::invalid_argument("mix_labels: input does not sum to 1");
  };
  check(za);
  check(zb);
  std::vector<double> out(za.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lambda * za[i] + (1.0 - lambda) * zb[i];
  return out;
}

PixelMixResult pixel_mix_baseline(PixelMixKind kind, const Clip& a, const Clip& b, double lambda, Rng& rng) {
  if (!(a.shape() == b.shape())) throw std::invalid_argument("pixel_mix_baseline: clip shapes differ");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("pixel_mix_baseline: lambda must lie in [0, 1]");
  if (kind == PixelMixKind::Mixup) {
    if (lambda == 1.0) return {a, 1.0};
    Clip out(a.shape());
    auto pa = a.pixels(), pb = b.pixels();
    auto po = out.pixels();
    for (std::size_t i = 0; i < po.size(); ++i) po[i] = static_cast<float>(lambda * pa[i] + (1.0 - lambda) * pb[i]);
    return {std::move(out), lambda};
  }
  const int h = a.height(), w = a.width();
  const double side = std::sqrt(1.0 - lambda);
  const int rh = std::clamp(static_cast<int>(std::lround(h * side)), 0, h);
  const int rw = std::clamp(static_cast<int>(std::lround(w * side)), 0, w);
  const int y0 = static_cast<int>(rng.uniform_int(0, h - rh));
  const int x0 = static_cast<int>(rng.uniform_int(0, w - rw));
  Clip out = a;
  for (int t = 0; t < a.frames(); ++t) {
    for (int y = y0; y < y0 + rh; ++y) {
      for (int x = x0; x < x0 + rw; ++x) {
        for (int c = 0; c < a.channels(); ++c) out.at(t, y, x, c) = b.at(t, y, x, c);
      }
    }
  }
  const double replaced = static_cast<double>(rh) * rw / (static_cast<double>(h) * w);
  return {std::move(out), 1.0 - replaced};
}

}  // namespace svf
