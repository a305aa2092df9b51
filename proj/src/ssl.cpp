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

#include "svf/ssl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "svf/errors.hpp"
#include "svf/ops.hpp"

namespace svf {

namespace {

Tensor zero_loss() { return Tensor::scalar(0.0); }

Tensor rows_to_tensor(const std::vector<std::vector<double>>& rows) {
  const auto c = static_cast<std::int64_t>(rows.front().size());
  std::vector<double> flat;
  flat.reserve(rows.size() * rows.front().size());
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  return Tensor::from_vector({static_cast<std::int64_t>(rows.size()), c}, std::move(flat));
}

}  // namespace

void SSLConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("invalid SSL config: " + msg); };
  if (!(delta > 0.0 && delta < 1.0)) fail("delta must lie in (0, 1)");
  if (gamma1 < 0.0 || gamma2 < 0.0) fail("loss weights must be >= 0");
  if (!(ema_momentum >= 0.0 && ema_momentum < 1.0)) fail("ema_momentum must lie in [0, 1)");
  if (!(alpha > 0.0)) fail("alpha must be positive");
  if (B_l < 1) fail("B_l must be >= 1");
  if (B_u < 0) fail("B_u must be >= 0");
  if (epochs < 1) fail("epochs must be >= 1");
  if (!(base_lr > 0.0)) fail("base_lr must be positive");
  if (!std::is_sorted(lr_drop_epochs.begin(), lr_drop_epochs.end())) fail("lr_drop_epochs must be sorted");
  for (int e : lr_drop_epochs) {
    if (e < 0 || e >= epochs) fail("lr_drop_epochs must lie in [0, epochs)");
  }
  if (sgd_momentum < 0.0 || weight_decay < 0.0) fail("momentum and weight decay must be >= 0");
}

Prediction make_prediction(std::vector<double> probs) {
  if (probs.empty()) throw std::invalid_argument("empty probability vector");
  Prediction p;
  const auto it = std::max_element(probs.begin(), probs.end());
  p.hard_label = static_cast<int>(it - probs.begin());
  p.confidence = *it;
  p.probs = std::move(probs);
  return p;
}

PseudoLabel pseudo_label_from_probs(std::vector<double> probs, double delta) {
  PseudoLabel out;
  out.prediction = make_prediction(std::move(probs));
  if (out.prediction.confidence >= delta) {
    out.form = LabelForm::Hard;
    out.target.assign(out.prediction.probs.size(), 0.0);
    out.target[static_cast<std::size_t>(out.prediction.hard_label)] = 1.0;
  } else {
    out.form = LabelForm::Soft;
    out.target = out.prediction.probs;
  }
  return out;
}

std::vector<std::vector<double>> teacher_predictions(const ModelState& teacher, std::span<const Clip> clips,
                                                     TeacherInput input, Rng& rng) {
  if (clips.empty()) return {};
  if (input == TeacherInput::Raw) return predict_probs(teacher, clips);
  std::vector<Clip> views;
  views.reserve(clips.size());
  for (const auto& c : clips) views.push_back(weak_augment(c, rng));
  return predict_probs(teacher, views);
}

PseudoLabel pseudo_label(const ModelState& teacher, const Clip& clip, double delta, Rng& rng) {
  auto probs = teacher_predictions(teacher, std::span<const Clip>(&clip, 1), TeacherInput::Weak, rng);
  return pseudo_label_from_probs(std::move(probs.front()), delta);
}

LossPart supervised_loss(const ModelState& student, std::span<const Clip> clips, std::span<const int> labels,
                         Rng& rng) {
  if (clips.size() != labels.size()) throw std::invalid_argument("supervised_loss: label count mismatch");
  if (clips.empty()) return {zero_loss(), true};
  for (int l : labels) {
    if (l < 0 || l >= student.config.n_classes) throw std::invalid_argument("supervised_loss: label out of range");
  }
  std::vector<Clip> views;
  views.reserve(clips.size());
  for (const auto& c : clips) views.push_back(weak_augment(c, rng));
  const Tensor logits = forward(student, views, true, rng);
  return {cross_entropy(logits, labels), false};
}

LossPart unsupervised_loss_from_teacher(const ModelState& student, std::span<const Clip> clips,
                                        const std::vector<std::vector<double>>& teacher_probs, double delta,
                                        bool strong_spatial, Rng& rng) {
  if (clips.size() != teacher_probs.size()) throw std::invalid_argument("unsupervised_loss: teacher batch mismatch");
  if (clips.empty()) return {zero_loss(), true};
  std::vector<int> targets(clips.size());
  std::vector<double> weights(clips.size());
  bool any = false;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const auto p = make_prediction(teacher_probs[i]);
    targets[i] = p.hard_label;
    weights[i] = p.confidence > delta ? 1.0 : 0.0;
    any = any || weights[i] != 0.0;
  }
  std::vector<Clip> views;
  views.reserve(clips.size());
  for (const auto& c : clips) {
    Clip v = weak_augment(c, rng);
    views.push_back(strong_spatial ? strong_spatial_augment(v, rng) : std::move(v));
  }
  // Every indicator closed: the loss is identically zero.
  if (!any) return {zero_loss(), true};
  const Tensor logits = forward(student, views, true, rng);
  return {cross_entropy(logits, targets, weights), false};
}

LossPart unsupervised_loss(const ModelState& student, const ModelState& teacher, std::span<const Clip> clips,
                           double delta, Rng& rng, bool strong_spatial) {
  const auto probs = teacher_predictions(teacher, clips, TeacherInput::Weak, rng);
  return unsupervised_loss_from_teacher(student, clips, probs, delta, strong_spatial, rng);
}

TTMixPlan plan_ttmix(std::span<const Clip> clips, const SSLConfig& config, int patch, Rng& rng) {
  TTMixPlan plan;
  const std::size_t n = clips.size();
  if (n == 0) return plan;
  plan.perm.resize(n);
  std::iota(plan.perm.begin(), plan.perm.end(), 0);
  rng.shuffle(std::span<int>(plan.perm));

  for (std::size_t i = 0; i < n; ++i) {
    plan.view_u.push_back(config.use_strong_spatial ? strong_spatial_augment(clips[i], rng) : clips[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Clip& partner = clips[static_cast<std::size_t>(plan.perm[i])];
    plan.view_s.push_back(config.use_twaug ? apply_temporal_warp(partner, plan_temporal_warp(partner.frames(), rng))
                                           : partner);
  }

  const auto& shape = clips.front().shape();
  const bool token_mix = config.mask_strategy == MixStrategy::Tube || config.mask_strategy == MixStrategy::Rand ||
                         config.mask_strategy == MixStrategy::Frame;
  const MaskStrategy mask_kind = config.mask_strategy == MixStrategy::Rand    ? MaskStrategy::Rand
                                 : config.mask_strategy == MixStrategy::Frame ? MaskStrategy::Frame
                                                                              : MaskStrategy::Tube;
  double lambda = 0.0;
  TokenMask shared_mask;
  Rng shared_rect(0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || config.per_sample_masks) {
      lambda = sample_lambda(config.alpha, rng);
      if (token_mix) {
        shared_mask = gen_mask(mask_kind, shape.height / patch, shape.width / patch, shape.frames, lambda, rng);
      } else {
        shared_rect = rng.split();
      }
    }
    if (token_mix) {
      plan.mixed.push_back(mix_clips(plan.view_u[i], plan.view_s[i], shared_mask, patch));
      plan.masks.push_back(shared_mask);
      plan.lambdas.push_back(shared_mask.realized_lambda);
    } else {
      Rng rect = shared_rect;  // same rectangle for every clip sharing this draw
      auto mixed = pixel_mix_baseline(
          config.mask_strategy == MixStrategy::Mixup ? PixelMixKind::Mixup : PixelMixKind::CutMix, plan.view_u[i],
          plan.view_s[i], lambda, rect);
      plan.mixed.push_back(std::move(mixed.clip));
      plan.lambdas.push_back(mixed.lambda_eff);
    }
  }
  return plan;
}

TTMixResult ttmix_loss_from_plan(const ModelState& student, const TTMixPlan& plan,
                                 const std::vector<std::vector<double>>& teacher_probs, const SSLConfig& config,
                                 Rng& rng) {
  TTMixResult result;
  const std::size_t n = plan.mixed.size();
  if (n < 2) {
    result.loss = zero_loss();
    result.skipped = true;
    result.warning = "mixed-consistency loss skipped: batch size " + std::to_string(n) + " < 2";
    return result;
  }
  if (teacher_probs.size() != n) throw std::invalid_argument("ttmix: teacher batch mismatch");

  const std::size_t classes = teacher_probs.front().size();
  std::vector<std::vector<double>> z_mix(n);
  std::size_t passed = 0;
  double lambda_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& z_u = teacher_probs[i];
    const auto& z_s = teacher_probs[static_cast<std::size_t>(plan.perm[i])];
    const double lam = plan.lambdas[i];
    const double c_u = *std::max_element(z_u.begin(), z_u.end());
    const double c_s = *std::max_element(z_s.begin(), z_s.end());
    z_mix[i].resize(classes);
    for (std::size_t j = 0; j < classes; ++j) z_mix[i][j] = lam * z_u[j] + (1.0 - lam) * z_s[j];
    const double c_m = lam * c_u + (1.0 - lam) * c_s;
    if (c_m >= config.delta) ++passed;
    lambda_sum += lam;
  }
  result.q = static_cast<double>(passed) / static_cast<double>(n);
  result.lambda_eff = lambda_sum / static_cast<double>(n);
  const double gate = config.mix_q_gate ? result.q : 1.0;
  if (gate == 0.0) {
    result.loss = zero_loss();
    return result;
  }
  const Tensor y_mix = softmax(forward(student, plan.mixed, true, rng), -1);
  const Tensor residual = sub(y_mix, rows_to_tensor(z_mix));
  result.loss = scale(squared_l2(residual), gate / static_cast<double>(n));
  return result;
}

TTMixResult ttmix_consistency_loss(const ModelState& student, const ModelState& teacher,
                                   std::span<const Clip> clips, const SSLConfig& config, Rng& rng) {
  if (clips.size() < 2) {
    TTMixResult r;
    r.loss = zero_loss();
    r.skipped = true;
    r.warning = "mixed-consistency loss skipped: batch size " + std::to_string(clips.size()) + " < 2";
    return r;
  }
  const auto probs = teacher_predictions(teacher, clips, config.teacher_input, rng);
  const auto plan = plan_ttmix(clips, config, student.config.patch, rng);
  return ttmix_loss_from_plan(student, plan, probs, config, rng);
}

void ema_update(ParamSet& teacher, const ParamSet& student, double m) {
  teacher.check_compatible(student);
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    auto t = teacher.entries()[i].value.mutable_data();
    const auto s = student.entries()[i].value.data();
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = round_to_float(m * t[k] + (1.0 - m) * s[k]);
  }
}

double total_loss(double loss_s, double loss_un, double loss_mix, double gamma1, double gamma2) {
  return loss_s + gamma1 * loss_un + gamma2 * loss_mix;
}

Tensor total_loss(const Tensor& loss_s, const Tensor& loss_un, const Tensor& loss_mix, double gamma1, double gamma2) {
  return add(add(loss_s, scale(loss_un, gamma1)), scale(loss_mix, gamma2));
}

double lr_at(int epoch, const SSLConfig& config) {
  if (epoch < 0) throw std::invalid_argument("lr_at: negative epoch");
  const auto drops = std::count_if(config.lr_drop_epochs.begin(), config.lr_drop_epochs.end(),
                                   [epoch](int e) { return e <= epoch; });
  return config.base_lr * std::pow(0.1, static_cast<double>(drops));
}

namespace {

// Independent streams per loss term, so skipping one term never shifts
// the random draws of another.
struct StepStreams {
  Rng sup, teacher, un, mix;
  explicit StepStreams(Rng& rng) : sup(rng.split()), teacher(rng.split()), un(rng.split()), mix(rng.split()) {}
};

}  // namespace

StepMetrics train_step(ModelState& student, ModelState& teacher, const TrainBatch& batch, const SSLConfig& config,
                       double lr, Rng& rng) {
  StepStreams streams(rng);
  StepMetrics m;
  m.lr = lr;
  student.params.zero_grad();

  const LossPart ls = supervised_loss(student, batch.labeled, batch.labels, streams.sup);
  m.labeled_empty = ls.empty;

  std::vector<std::vector<double>> probs;
  const bool need_teacher = (config.gamma1 != 0.0 || config.gamma2 != 0.0) && !batch.unlabeled.empty();
  if (need_teacher) probs = teacher_predictions(teacher, batch.unlabeled, config.teacher_input, streams.teacher);

  Tensor lun = zero_loss();
  if (config.gamma1 != 0.0 && !batch.unlabeled.empty()) {
    lun = unsupervised_loss_from_teacher(student, batch.unlabeled, probs, config.delta, config.use_strong_spatial,
                                         streams.un)
              .value;
  }

  Tensor lmix = zero_loss();
  if (config.gamma2 != 0.0) {
    if (batch.unlabeled.size() < 2) {
      m.mix_skipped = true;
    } else {
      const auto plan = plan_ttmix(batch.unlabeled, config, student.config.patch, streams.mix);
      auto r = ttmix_loss_from_plan(student, plan, probs, config, streams.mix);
      lmix = r.loss;
      m.q = r.q;
      m.lambda_eff = r.lambda_eff;
      m.mix_skipped = r.skipped;
    }
  }

  const Tensor total = total_loss(ls.value, lun, lmix, config.gamma1, config.gamma2);
  m.loss_s = ls.value.item();
  m.loss_un = lun.item();
  m.loss_mix = lmix.item();
  m.total = total.item();
  if (!std::isfinite(m.total)) throw NumericError("non-finite training loss");

  if (total.requires_grad()) backward(total);
  sgd_step(student.params, {lr, config.sgd_momentum, config.weight_decay});
  if (!student.params.all_finite()) throw NumericError("non-finite parameter after SGD step");

  if (config.teacher_mode == TeacherMode::Ema) {
    ema_update(teacher.params, student.params, config.ema_momentum);
  } else {
    teacher.params.copy_values_from(student.params);
  }
  return m;
}

StepMetrics supervised_step(ModelState& student, const TrainBatch& batch, const SSLConfig& config, double lr,
                            Rng& rng) {
  StepStreams streams(rng);
  StepMetrics m;
  m.lr = lr;
  student.params.zero_grad();
  const LossPart ls = supervised_loss(student, batch.labeled, batch.labels, streams.sup);
  m.labeled_empty = ls.empty;
  m.loss_s = m.total = ls.value.item();
  if (!std::isfinite(m.total)) throw NumericError("non-finite training loss");
  if (ls.value.requires_grad()) backward(ls.value);
  sgd_step(student.params, {lr, config.sgd_momentum, config.weight_decay});
  return m;
}

std::vector<Clip> evaluation_views(const Clip& video, const ModelConfig& config, int n_clips, int n_crops) {
  if (n_clips < 1 || n_crops < 1) throw std::invalid_argument("evaluate: n_clips and n_crops must be >= 1");
  const int tv = video.frames(), t = config.frames;
  if (tv < t) throw std::invalid_argument("evaluate: video shorter than the model clip length");
  std::vector<Clip> views;
  views.reserve(static_cast<std::size_t>(n_clips) * n_crops);
  for (int i = 0; i < n_clips; ++i) {
    const int start = n_clips == 1 ? (tv - t) / 2
                                   : static_cast<int>(std::lround(static_cast<double>(i) * (tv - t) / (n_clips - 1)));
    const Clip window = tv == t ? video : video.window(start, t);
    for (int j = 0; j < n_crops; ++j) {
      if (n_crops == 1) {
        views.push_back(window);
        continue;
      }
      WeakParams crop;
      crop.scale = 1.25;
      const int sh = static_cast<int>(std::lround(window.height() * crop.scale));
      const int sw = static_cast<int>(std::lround(window.width() * crop.scale));
      crop.offset_y = (sh - window.height()) / 2;
      crop.offset_x = static_cast<int>(std::lround(static_cast<double>(j) * (sw - window.width()) / (n_crops - 1)));
      views.push_back(apply_weak(window, crop));
    }
  }
  return views;
}

EvalReport evaluate(const ModelState& model, std::span<const VideoSample> dataset, int n_clips, int n_crops) {
  if (dataset.empty()) throw std::invalid_argument("evaluate: empty dataset");
  const int per_video = n_clips * n_crops;
  EvalReport report;
  report.clips_per_video = n_clips;
  report.crops_per_video = n_crops;
  const int k = std::min(5, model.config.n_classes);
  std::int64_t hit1 = 0, hit5 = 0;

  constexpr std::size_t kViewsPerBatch = 64;
  std::vector<Clip> pending;
  std::vector<int> pending_labels;  // one per video in `pending`
  auto flush = [&] {
    if (pending.empty()) return;
    const auto probs = predict_probs(model, pending);
    report.views_evaluated += static_cast<std::int64_t>(probs.size());
    for (std::size_t v = 0; v < pending_labels.size(); ++v) {
      std::vector<double> avg(static_cast<std::size_t>(model.config.n_classes), 0.0);
      for (int r = 0; r < per_video; ++r) {
        const auto& row = probs[v * static_cast<std::size_t>(per_video) + static_cast<std::size_t>(r)];
        for (std::size_t c = 0; c < avg.size(); ++c) avg[c] += row[c] / per_video;
      }
      std::vector<int> order(avg.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&avg](int a, int b) { return avg[static_cast<std::size_t>(a)] > avg[static_cast<std::size_t>(b)]; });
      const int label = pending_labels[v];
      if (order.front() == label) ++hit1;
      if (std::find(order.begin(), order.begin() + k, label) != order.begin() + k) ++hit5;
    }
    pending.clear();
    pending_labels.clear();
  };

  for (const auto& sample : dataset) {
    if (sample.label < 0 || sample.label >= model.config.n_classes) {
      throw std::invalid_argument("evaluate: sample " + std::to_string(sample.sample_id) + " has no valid label");
    }
    auto views = evaluation_views(sample.clip, model.config, n_clips, n_crops);
    for (auto& v : views) pending.push_back(std::move(v));
    pending_labels.push_back(sample.label);
    ++report.videos;
    if (pending.size() >= kViewsPerBatch) flush();
  }
  flush();
  report.top1 = 100.0 * static_cast<double>(hit1) / static_cast<double>(report.videos);
  report.top5 = 100.0 * static_cast<double>(hit5) / static_cast<double>(report.videos);
  return report;
}

}  // namespace svf
