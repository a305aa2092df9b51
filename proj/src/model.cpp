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

#include "svf/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "svf/ops.hpp"

namespace svf {

namespace {

using Index = std::vector<std::int64_t>;

GatherIndex share(Index idx) { return std::make_shared<const Index>(std::move(idx)); }

std::vector<double> truncated_normal(Rng& rng, std::int64_t n, double stddev) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) {
    double x;
    do {
      x = rng.normal();
    } while (std::abs(x) > 2.0);
    v = x * stddev;
  }
  return out;
}

std::string block_prefix(int b) { return "blocks." + std::to_string(b) + "."; }

Tensor clips_to_tensor(const ModelConfig& cfg, std::span<const Clip> clips) {
  if (clips.empty()) throw std::invalid_argument("forward: empty batch");
  const auto expected = cfg.clip_shape();
  const auto per = expected.numel();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(per) * clips.size());
  for (const auto& c : clips) {
    if (!(c.shape() == expected)) {
      throw std::invalid_argument("clip shape " + std::to_string(c.frames()) + "x" + std::to_string(c.height()) + "x" +
                                  std::to_string(c.width()) + "x" + std::to_string(c.channels()) +
                                  " does not match model config");
    }
    flat.insert(flat.end(), c.pixels().begin(), c.pixels().end());
  }
  return Tensor::from_vector({static_cast<std::int64_t>(clips.size()), per}, std::move(flat));
}

// [B, T*H*W*C] pixels -> [B, T*S, patch*patch*C] patch rows.
GatherIndex patchify_index(const ModelConfig& cfg, std::int64_t batch) {
  const int p = cfg.patch, c = cfg.channels, gh = cfg.grid_h(), gw = cfg.grid_w();
  const std::int64_t per_clip = cfg.clip_shape().numel();
  Index idx;
  idx.reserve(static_cast<std::size_t>(batch * per_clip));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (int t = 0; t < cfg.frames; ++t) {
      for (int gy = 0; gy < gh; ++gy) {
        for (int gx = 0; gx < gw; ++gx) {
          for (int py = 0; py < p; ++py) {
            for (int px = 0; px < p; ++px) {
              const std::int64_t y = gy * p + py, x = gx * p + px;
              for (int ch = 0; ch < c; ++ch) {
                idx.push_back(b * per_clip + ((t * cfg.height + y) * cfg.width + x) * c + ch);
              }
            }
          }
        }
      }
    }
  }
  return share(std::move(idx));
}

Tensor dropout(const Tensor& x, double rate, bool train_mode, Rng& rng) {
  if (!train_mode || rate <= 0.0) return x;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> mask(static_cast<std::size_t>(x.numel()));
  for (auto& m : mask) m = rng.bernoulli(rate) ? 0.0 : keep_scale;
  return mul(x, Tensor::from_vector(x.dims(), std::move(mask)));
}

Tensor linear(const Tensor& x, const ParamSet& params, const std::string& name) {
  return add(matmul(x, params.get(name + ".weight")), params.get(name + ".bias"));
}

Tensor norm(const Tensor& x, const ParamSet& params, const std::string& name) {
  return layer_norm(x, params.get(name + ".weight"), params.get(name + ".bias"));
}

// Multi-head self-attention over [G, L, D] groups.
Tensor attention(const Tensor& h, const ParamSet& params, const std::string& name, int heads) {
  const std::int64_t g = h.dim(0), l = h.dim(1), d = h.dim(2);
  const std::int64_t dh = d / heads;
  const Tensor qkv = linear(h, params, name + ".qkv");  // [G, L, 3D]

  // q, v: [G, heads, L, dh]; k^T: [G, heads, dh, L].
  Index qi, kti, vi;
  qi.reserve(static_cast<std::size_t>(g * l * d));
  vi.reserve(qi.capacity());
  kti.reserve(qi.capacity());
  for (std::int64_t gi = 0; gi < g; ++gi) {
    for (int hd = 0; hd < heads; ++hd) {
      for (std::int64_t li = 0; li < l; ++li) {
        for (std::int64_t j = 0; j < dh; ++j) {
          const std::int64_t base = (gi * l + li) * 3 * d + hd * dh + j;
          qi.push_back(base);
          vi.push_back(base + 2 * d);
        }
      }
      for (std::int64_t j = 0; j < dh; ++j) {
        for (std::int64_t li = 0; li < l; ++li) kti.push_back((gi * l + li) * 3 * d + d + hd * dh + j);
      }
    }
  }
  const Tensor q = gather(qkv, share(std::move(qi)), {g, heads, l, dh});
  const Tensor kt = gather(qkv, share(std::move(kti)), {g, heads, dh, l});
  const Tensor v = gather(qkv, share(std::move(vi)), {g, heads, l, dh});

  const Tensor weights = softmax(scale(matmul(q, kt), 1.0 / std::sqrt(static_cast<double>(dh))), -1);
  const Tensor ctx = matmul(weights, v);  // [G, heads, L, dh]

  Index merge;
  merge.reserve(static_cast<std::size_t>(g * l * d));
  for (std::int64_t gi = 0; gi < g; ++gi) {
    for (std::int64_t li = 0; li < l; ++li) {
      for (int hd = 0; hd < heads; ++hd) {
        for (std::int64_t j = 0; j < dh; ++j) merge.push_back(((gi * heads + hd) * l + li) * dh + j);
      }
    }
  }
  const Tensor merged = gather(ctx, share(std::move(merge)), {g, l, d});
  return linear(merged, params, name + ".proj");
}

}  // namespace

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid model config: " + msg); };
  if (frames <= 0 || height <= 0 || width <= 0 || channels <= 0) fail("clip dims must be positive");
  if (patch <= 0) fail("patch must be positive");
  if (height % patch != 0 || width % patch != 0) fail("height and width must be multiples of patch");
  if (dim <= 0 || heads <= 0 || blocks <= 0) fail("dim, heads and blocks must be positive");
  if (dim % heads != 0) fail("dim must be a multiple of heads");
  if (n_classes < 2) fail("need at least two classes");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) fail("drop_rate must lie in [0, 1)");
}

ModelConfig ModelConfig::s_toy() { return ModelConfig{}; }

ModelConfig ModelConfig::b_toy() {
  ModelConfig c;
  c.dim = 64;
  c.heads = 4;
  c.blocks = 4;
  return c;
}

ModelState init_model(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ModelState state{config, {}};
  auto& ps = state.params;
  const std::int64_t d = config.dim;
  const std::int64_t hidden = 4 * d;
  auto weight = [&](const std::string& name, Dims dims) { ps.add(name, dims, truncated_normal(rng, numel(dims), 0.02)); };
  auto zeros = [&](const std::string& name, Dims dims) {
    ps.add(name, dims, std::vector<double>(static_cast<std::size_t>(numel(dims)), 0.0));
  };
  auto ones = [&](const std::string& name, Dims dims) {
    ps.add(name, dims, std::vector<double>(static_cast<std::size_t>(numel(dims)), 1.0));
  };
  auto norm_params = [&](const std::string& name) {
    ones(name + ".weight", {d});
    zeros(name + ".bias", {d});
  };
  auto linear_params = [&](const std::string& name, std::int64_t in, std::int64_t out) {
    weight(name + ".weight", {in, out});
    zeros(name + ".bias", {out});
  };

  linear_params("patch_embed", config.patch_numel(), d);
  weight("cls_token", {d});
  weight("pos_spatial", {1 + config.sites(), d});
  weight("pos_temporal", {config.frames, d});
  for (int b = 0; b < config.blocks; ++b) {
    const auto p = block_prefix(b);
    norm_params(p + "temporal_norm");
    linear_params(p + "temporal_attn.qkv", d, 3 * d);
    linear_params(p + "temporal_attn.proj", d, d);
    norm_params(p + "spatial_norm");
    linear_params(p + "spatial_attn.qkv", d, 3 * d);
    linear_params(p + "spatial_attn.proj", d, d);
    norm_params(p + "mlp_norm");
    linear_params(p + "mlp.fc1", d, hidden);
    linear_params(p + "mlp.fc2", hidden, d);
  }
  norm_params("norm");
  zeros("head.weight", {d, config.n_classes});
  zeros("head.bias", {config.n_classes});
  return state;
}

Tensor tokenize(const ModelState& state, std::span<const Clip> clips) {
  const auto& cfg = state.config;
  const auto& ps = state.params;
  const std::int64_t batch = static_cast<std::int64_t>(clips.size());
  const std::int64_t s = cfg.sites(), t = cfg.frames, d = cfg.dim, n = t * s;

  const Tensor pixels = clips_to_tensor(cfg, clips);
  const Tensor patches = gather(pixels, patchify_index(cfg, batch), {batch, n, cfg.patch_numel()});
  const Tensor embedded = linear(patches, ps, "patch_embed");

  // Position table [T*S, D]: spatial rows 1..S tiled per frame plus the frame's temporal row.
  Index spatial_idx, temporal_idx;
  spatial_idx.reserve(static_cast<std::size_t>(n * d));
  temporal_idx.reserve(spatial_idx.capacity());
  for (std::int64_t ti = 0; ti < t; ++ti) {
    for (std::int64_t si = 0; si < s; ++si) {
      for (std::int64_t j = 0; j < d; ++j) {
        spatial_idx.push_back((1 + si) * d + j);
        temporal_idx.push_back(ti * d + j);
      }
    }
  }
  const Tensor pos = add(gather(ps.get("pos_spatial"), share(std::move(spatial_idx)), {n, d}),
                         gather(ps.get("pos_temporal"), share(std::move(temporal_idx)), {n, d}));
  return add(embedded, pos);
}

Tensor encode(const ModelState& state, std::span<const Clip> clips, bool train_mode, Rng& rng,
              const ForwardOptions& options) {
  const auto& cfg = state.config;
  const auto& ps = state.params;
  const std::int64_t batch = static_cast<std::int64_t>(clips.size());
  const std::int64_t s = cfg.sites(), t = cfg.frames, d = cfg.dim, n = t * s, seq = 1 + n;
  const double rate = cfg.drop_rate;

  const Tensor tokens = tokenize(state, clips);

  // Sequence [B, 1 + T*S, D] with the class token (plus spatial position 0) in row 0.
  Index shift, cls_slot;
  shift.reserve(static_cast<std::size_t>(batch * seq * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t r = 0; r < seq; ++r) {
      for (std::int64_t j = 0; j < d; ++j) shift.push_back(r == 0 ? -1 : (b * n + r - 1) * d + j);
    }
  }
  cls_slot.reserve(static_cast<std::size_t>(seq * d));
  for (std::int64_t r = 0; r < seq; ++r) {
    for (std::int64_t j = 0; j < d; ++j) cls_slot.push_back(r == 0 ? j : -1);
  }
  const GatherIndex cls_slot_idx = share(std::move(cls_slot));
  Index pos0;
  for (std::int64_t j = 0; j < d; ++j) pos0.push_back(j);
  const Tensor cls_row = add(ps.get("cls_token"), gather(ps.get("pos_spatial"), share(std::move(pos0)), {d}));
  Tensor x = add(gather(tokens, share(std::move(shift)), {batch, seq, d}), gather(cls_row, cls_slot_idx, {seq, d}));

  // Regrouping indices shared by every block.
  Index to_temporal, from_temporal, to_spatial, from_spatial, cls_copies, cls_back;
  to_temporal.reserve(static_cast<std::size_t>(batch * n * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t si = 0; si < s; ++si) {
      for (std::int64_t ti = 0; ti < t; ++ti) {
        for (std::int64_t j = 0; j < d; ++j) to_temporal.push_back((b * seq + 1 + ti * s + si) * d + j);
      }
    }
  }
  from_temporal.reserve(static_cast<std::size_t>(batch * seq * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t r = 0; r < seq; ++r) {
      const std::int64_t ti = (r - 1) / s, si = (r - 1) % s;
      for (std::int64_t j = 0; j < d; ++j) from_temporal.push_back(r == 0 ? -1 : ((b * s + si) * t + ti) * d + j);
    }
  }
  to_spatial.reserve(static_cast<std::size_t>(batch * t * (1 + s) * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t ti = 0; ti < t; ++ti) {
      for (std::int64_t r = 0; r <= s; ++r) {
        const std::int64_t src_row = r == 0 ? 0 : 1 + ti * s + (r - 1);
        for (std::int64_t j = 0; j < d; ++j) to_spatial.push_back((b * seq + src_row) * d + j);
      }
    }
  }
  from_spatial.reserve(static_cast<std::size_t>(batch * seq * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t r = 0; r < seq; ++r) {
      const std::int64_t ti = (r - 1) / s, si = (r - 1) % s;
      for (std::int64_t j = 0; j < d; ++j) {
        from_spatial.push_back(r == 0 ? -1 : ((b * t + ti) * (1 + s) + 1 + si) * d + j);
      }
    }
  }
  cls_copies.reserve(static_cast<std::size_t>(batch * t * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t ti = 0; ti < t; ++ti) {
      for (std::int64_t j = 0; j < d; ++j) cls_copies.push_back((b * t + ti) * (1 + s) * d + j);
    }
  }
  cls_back.reserve(static_cast<std::size_t>(batch * seq * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t r = 0; r < seq; ++r) {
      for (std::int64_t j = 0; j < d; ++j) cls_back.push_back(r == 0 ? b * d + j : -1);
    }
  }
  const auto to_t = share(std::move(to_temporal)), from_t = share(std::move(from_temporal));
  const auto to_s = share(std::move(to_spatial)), from_s = share(std::move(from_spatial));
  const auto cls_c = share(std::move(cls_copies)), cls_b = share(std::move(cls_back));

  for (int blk = 0; blk < cfg.blocks; ++blk) {
    const auto p = block_prefix(blk);

    // Temporal attention: each spatial site attends across frames; the class token is skipped.
    {
      const Tensor groups = gather(x, to_t, {batch * s, t, d});
      Tensor a = attention(norm(groups, ps, p + "temporal_norm"), ps, p + "temporal_attn", cfg.heads);
      a = dropout(a, rate, train_mode, rng);
      x = add(x, gather(a, from_t, {batch, seq, d}));
    }

    // Spatial attention within each frame, class token prepended to every frame.
    if (!options.skip_spatial) {
      const Tensor frames = gather(x, to_s, {batch * t, 1 + s, d});
      Tensor a = attention(norm(frames, ps, p + "spatial_norm"), ps, p + "spatial_attn", cfg.heads);
      a = dropout(a, rate, train_mode, rng);
      const Tensor cls_mean = mean(gather(a, cls_c, {batch, t, d}), 1);  // per-frame copies averaged
      x = add(add(x, gather(a, from_s, {batch, seq, d})), gather(cls_mean, cls_b, {batch, seq, d}));
    }

    if (!options.skip_mlp) {
      Tensor h = gelu(linear(norm(x, ps, p + "mlp_norm"), ps, p + "mlp.fc1"));
      h = dropout(h, rate, train_mode, rng);
      h = dropout(linear(h, ps, p + "mlp.fc2"), rate, train_mode, rng);
      x = add(x, h);
    }
  }
  return x;
}

Tensor forward(const ModelState& state, std::span<const Clip> clips, bool train_mode, Rng& rng) {
  const auto& cfg = state.config;
  const std::int64_t batch = static_cast<std::int64_t>(clips.size());
  const std::int64_t d = cfg.dim, seq = 1 + static_cast<std::int64_t>(cfg.frames) * cfg.sites();
  const Tensor x = encode(state, clips, train_mode, rng);
  Index cls;
  cls.reserve(static_cast<std::size_t>(batch * d));
  for (std::int64_t b = 0; b < batch; ++b) {
    for (std::int64_t j = 0; j < d; ++j) cls.push_back(b * seq * d + j);
  }
  const Tensor cls_token = gather(x, share(std::move(cls)), {batch, d});
  return linear(norm(cls_token, state.params, "norm"), state.params, "head");
}

std::vector<std::vector<double>> predict_probs(const ModelState& state, std::span<const Clip> clips) {
  NoGradGuard no_grad;
  Rng unused(0);
  const Tensor probs = softmax(forward(state, clips, false, unused), -1);
  const std::int64_t c = probs.dim(1);
  std::vector<std::vector<double>> out(clips.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].assign(probs.data().begin() + static_cast<std::ptrdiff_t>(i) * c,
                  probs.data().begin() + static_cast<std::ptrdiff_t>(i + 1) * c);
  }
  return out;
}

}  // namespace svf
