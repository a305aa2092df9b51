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

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "svf/augment.hpp"

using namespace svf;
using svf::testing::random_clip;

namespace {

const ClipShape kShape{8, 16, 16, 1};

// Every source sequence allowed by the gap rule: kept frames stay in place,
// the sequence is nondecreasing over kept values, positions before the first
// kept frame copy it and positions after the last copy the last.
std::set<std::vector<int>> enumerate_fillings(int frames, const std::vector<int>& kept) {
  std::set<std::vector<int>> out;
  std::vector<int> seq(static_cast<std::size_t>(frames), 0);
  std::function<void(int)> rec = [&](int pos) {
    if (pos == frames) {
      for (int i = 1; i < frames; ++i) {
        if (seq[static_cast<std::size_t>(i)] < seq[static_cast<std::size_t>(i - 1)]) return;
      }
      for (int k : kept) {
        if (seq[static_cast<std::size_t>(k)] != k) return;
      }
      for (int i = 0; i < frames; ++i) {
        if (i < kept.front() && seq[static_cast<std::size_t>(i)] != kept.front()) return;
        if (i > kept.back() && seq[static_cast<std::size_t>(i)] != kept.back()) return;
      }
      out.insert(seq);
      return;
    }
    for (int k : kept) {
      seq[static_cast<std::size_t>(pos)] = k;
      rec(pos + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace

TEST_SUITE("augment") {

TEST_CASE("neutral weak parameters are the identity") {
  Rng rng(1);
  const Clip c = random_clip(kShape, rng);
  CHECK(apply_weak(c, WeakParams{false, 1.0, 0, 0}) == c);
}

TEST_CASE("flipping twice restores the clip and a flip mirrors columns") {
  Rng rng(2);
  const Clip c = random_clip(kShape, rng);
  const WeakParams flip{true, 1.0, 0, 0};
  const Clip once = apply_weak(c, flip);
  CHECK(apply_weak(once, flip) == c);
  for (int t = 0; t < kShape.frames; ++t) {
    for (int y = 0; y < kShape.height; ++y) {
      for (int x = 0; x < kShape.width; ++x) CHECK(once.at(t, y, x) == c.at(t, y, kShape.width - 1 - x));
    }
  }
}

TEST_CASE("weak augmentation keeps dims, range, and treats frames alike") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Clip c = random_clip(kShape, rng);
    for (int t = 1; t < c.frames(); ++t) std::copy(c.frame(0).begin(), c.frame(0).end(), c.frame(t).begin());
    const WeakParams p = draw_weak_params(c.shape(), rng);
    CHECK(p.scale >= 1.0);
    CHECK(p.scale <= 1.25);
    CHECK(p.offset_y >= 0);
    CHECK(p.offset_x >= 0);
    CHECK(p.offset_y <= static_cast<int>(std::lround(16 * p.scale)) - 16);
    const Clip out = apply_weak(c, p);
    CHECK(out.shape() == c.shape());
    CHECK(in_unit_range(out));
    for (int t = 1; t < out.frames(); ++t) CHECK(std::equal(out.frame(t).begin(), out.frame(t).end(), out.frame(0).begin()));
  }
}

TEST_CASE("strong pool with neutral brightness and contrast is the identity") {
  Rng rng(4);
  const Clip c = random_clip(kShape, rng);
  StrongPool pool;
  pool.ops = {StrongOpKind::Brightness, StrongOpKind::Contrast};
  pool.brightness = {0.0, 0.0};
  pool.contrast = {1.0, 1.0};
  CHECK(strong_spatial_augment(c, rng, pool) == c);
}

TEST_CASE("strong augmentation stays in the unit range") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Clip c = random_clip(kShape, rng);
    const Clip out = strong_spatial_augment(c, rng);
    CHECK(out.shape() == c.shape());
    CHECK(in_unit_range(out));
  }
}

TEST_CASE("dropout with probability one zeroes the clip") {
  Rng rng(6);
  const Clip c = random_clip(kShape, rng);
  StrongPool pool;
  pool.ops = {StrongOpKind::PixelDropout};
  pool.ops_per_clip = 1;
  pool.dropout = {1.0, 1.0};
  for (float v : strong_spatial_augment(c, rng, pool).pixels()) CHECK(v == 0.0f);
}

TEST_CASE("strong ops draw two distinct ops with in-range parameters") {
  Rng rng(7);
  const StrongPool pool;
  for (int trial = 0; trial < 500; ++trial) {
    const auto ops = draw_strong_ops(kShape, pool, rng);
    REQUIRE(ops.size() == 2);
    CHECK(ops[0].kind != ops[1].kind);
    for (const auto& op : ops) {
      switch (op.kind) {
        case StrongOpKind::Brightness: CHECK(std::abs(op.amount) <= 0.3); break;
        case StrongOpKind::Contrast: CHECK((op.amount >= 0.5 && op.amount <= 1.5)); break;
        case StrongOpKind::Noise: CHECK((op.amount >= 0.0 && op.amount <= 0.1)); break;
        case StrongOpKind::PixelDropout: CHECK((op.amount >= 0.0 && op.amount <= 0.2)); break;
        case StrongOpKind::Cutout:
          CHECK(op.rect_h * op.rect_w <= 0.25 * 16 * 16);
          CHECK(op.rect_y + op.rect_h <= 16);
          CHECK(op.rect_x + op.rect_w <= 16);
          break;
      }
    }
  }
}

TEST_CASE("non-noise strong ops apply the same change to every frame") {
  Rng rng(8);
  StrongPool pool;
  pool.ops = {StrongOpKind::Brightness, StrongOpKind::Contrast, StrongOpKind::PixelDropout, StrongOpKind::Cutout};
  for (int trial = 0; trial < 50; ++trial) {
    Clip c = random_clip(kShape, rng);
    for (int t = 1; t < c.frames(); ++t) std::copy(c.frame(0).begin(), c.frame(0).end(), c.frame(t).begin());
    const Clip out = strong_spatial_augment(c, rng, pool);
    for (int t = 1; t < out.frames(); ++t) CHECK(std::equal(out.frame(t).begin(), out.frame(t).end(), out.frame(0).begin()));
  }
}

TEST_CASE("augmentations are deterministic given the seed") {
  Rng src(9);
  const Clip c = random_clip(kShape, src);
  Rng a(77), b(77);
  CHECK(weak_augment(c, a) == weak_augment(c, b));
  CHECK(strong_spatial_augment(c, a) == strong_spatial_augment(c, b));
  const WarpPlan pa = plan_temporal_warp(8, a), pb = plan_temporal_warp(8, b);
  CHECK(pa.source == pb.source);
  CHECK(apply_temporal_warp(c, pa) == apply_temporal_warp(c, pb));
}

TEST_CASE("selection sizes") {
  CHECK(warp_selection_sizes(8) == std::vector<int>{2, 4, 8});
  CHECK(warp_selection_sizes(16) == std::vector<int>{4, 8, 16});
  CHECK(warp_selection_sizes(6) == std::vector<int>{1, 3, 6});
  CHECK(warp_selection_sizes(5) == std::vector<int>{1, 3, 5});
}

TEST_CASE("keeping every frame is the identity plan") {
  Rng rng(10);
  const WarpPlan plan = fill_temporal_warp(8, {0, 1, 2, 3, 4, 5, 6, 7}, rng);
  CHECK(plan.source == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(plan.is_identity());
  const Clip c = random_clip(kShape, rng);
  CHECK(apply_temporal_warp(c, plan) == c);
}

TEST_CASE("a single kept frame is stretched over the clip") {
  Rng rng(11);
  const WarpPlan plan = fill_temporal_warp(8, {5}, rng);
  CHECK(plan.source == std::vector<int>(8, 5));
}

TEST_CASE("gap fillings match the enumeration oracle") {
  const std::vector<std::pair<int, std::vector<int>>> cases = {
      {4, {0, 2}}, {4, {1, 3}}, {5, {1, 4}}, {6, {0, 2, 5}}, {6, {2}}, {6, {1, 2, 3}}, {7, {0, 6}}};
  for (const auto& [frames, kept] : cases) {
    CAPTURE(frames);
    const auto allowed = enumerate_fillings(frames, kept);
    std::set<std::vector<int>> seen;
    Rng rng(static_cast<std::uint64_t>(frames * 100 + kept.size()));
    for (int trial = 0; trial < 4000; ++trial) {
      const WarpPlan plan = fill_temporal_warp(frames, kept, rng);
      CHECK(plan.valid());
      CHECK(allowed.count(plan.source) == 1);
      seen.insert(plan.source);
    }
    CHECK(seen == allowed);  // every admissible filling is reachable
  }
  // The worked example: kept {0, 2} of four frames.
  CHECK(enumerate_fillings(4, {0, 2}) == std::set<std::vector<int>>{{0, 0, 2, 2}, {0, 2, 2, 2}});
}

TEST_CASE("warp copies whole frames in source order") {
  Rng rng(12);
  const ClipShape s{4, 4, 4, 1};
  const Clip c = random_clip(s, rng);
  WarpPlan plan;
  plan.frames = 4;
  plan.kept = {0, 2};
  plan.source = {0, 0, 2, 2};
  const Clip out = apply_temporal_warp(c, plan);
  for (int t = 0; t < 4; ++t) {
    const int src = plan.source[static_cast<std::size_t>(t)];
    CHECK(std::equal(out.frame(t).begin(), out.frame(t).end(), c.frame(src).begin()));
  }
  WarpPlan wrong = plan;
  wrong.frames = 5;
  wrong.source.push_back(2);
  CHECK_THROWS_AS(apply_temporal_warp(c, wrong), std::invalid_argument);
}

TEST_CASE("random warp plans keep order and cover kept frames") {
  Rng rng(13);
  std::map<int, int> k_counts;
  for (int trial = 0; trial < 5000; ++trial) {
    const int frames = static_cast<int>(rng.uniform_int(1, 16));
    const WarpPlan plan = plan_temporal_warp(frames, rng);
    CHECK(plan.valid());
    const auto sizes = warp_selection_sizes(frames);
    CHECK(std::find(sizes.begin(), sizes.end(), static_cast<int>(plan.kept.size())) != sizes.end());
    if (static_cast<int>(plan.kept.size()) == frames) CHECK(plan.is_identity());
    if (frames == 8) ++k_counts[static_cast<int>(plan.kept.size())];
    const Clip c = random_clip({frames, 4, 4, 1}, rng);
    const Clip out = apply_temporal_warp(c, plan);
    for (int t = 0; t < frames; ++t) {
      bool matches = false;
      for (int s = 0; s < frames && !matches; ++s) matches = std::equal(out.frame(t).begin(), out.frame(t).end(), c.frame(s).begin());
      CHECK(matches);
    }
  }
  // Roughly uniform over {2, 4, 8}.
  const int total = k_counts[2] + k_counts[4] + k_counts[8];
  for (int k : {2, 4, 8}) CHECK(std::abs(k_counts[k] - total / 3.0) < 0.2 * total / 3.0);
}

}  // TEST_SUITE
