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
#include <string>
#include <vector>

#include "svf/augment.hpp"
#include "svf/data.hpp"
#include "svf/mix.hpp"
#include "svf/model.hpp"
#include "svf/params.hpp"
#include "svf/rng.hpp"
#include "svf/tensor.hpp"

namespace svf {

enum class TeacherMode { Ema, Shared };
enum class MixStrategy { Tube, Rand, Frame, Mixup, CutMix };
enum class TeacherInput { Weak, Raw };

struct SSLConfig {
  double delta = 0.3;  // confidence threshold
  double gamma1 = 2.0;
  double gamma2 = 2.0;
  double ema_momentum = 0.99;
  double alpha = 10.0;  // Beta(alpha, alpha) for the mix ratio
  int B_l = 1;
  int B_u = 5;
  int epochs = 30;
  double base_lr = 0.005;
  std::vector<int> lr_drop_epochs{25, 28};
  double sgd_momentum = 0.9;
  double weight_decay = 0.001;
  MixStrategy mask_strategy = MixStrategy::Tube;
  TeacherMode teacher_mode = TeacherMode::Ema;
  bool use_twaug = true;
  bool use_strong_spatial = true;
  /// Scale the mix loss by the confidence gate q. Off gives the plain
  /// mean-squared-error form.
  bool mix_q_gate = true;
  TeacherInput teacher_input = TeacherInput::Weak;
  /// One mask and ratio per mini-batch by default; per-sample when set.
  bool per_sample_masks = false;

  void validate() const;
};

struct Prediction {
  std::vector<double> probs;
  double confidence = 0.0;
  int hard_label = 0;
};

Prediction make_prediction(std::vector<double> probs);

enum class LabelForm { Hard, Soft };

struct PseudoLabel {
  Prediction prediction;
  LabelForm form = LabelForm::Soft;
  /// One-hot of the argmax when hard, the teacher distribution when soft.
  std::vector<double> target;
};

/// Hard when confidence >= delta, soft otherwise.
PseudoLabel pseudo_label_from_probs(std::vector<double> probs, double delta);
/// Teacher prediction on a weakly augmented view, eval mode, no gradient.
PseudoLabel pseudo_label(const ModelState& teacher, const Clip& clip, double delta, Rng& rng);

/// Teacher probabilities for a batch: weak views (or the raw clips), eval
/// mode, stop-gradient.
std::vector<std::vector<double>> teacher_predictions(const ModelState& teacher, std::span<const Clip> clips,
                                                     TeacherInput input, Rng& rng);

struct LossPart {
  Tensor value;        // scalar; a constant zero when skipped
  bool empty = false;  // no samples contributed
};

/// Mean cross-entropy of the student (train mode) on weak views of the
/// labeled clips. An empty batch gives a zero loss with `empty` set.
LossPart supervised_loss(const ModelState& student, std::span<const Clip> clips, std::span<const int> labels,
                         Rng& rng);

/// Pseudo-label loss from precomputed teacher probabilities: student sees
/// strong views, cross-entropy against the hard pseudo label counted only
/// where confidence > delta (strict), averaged over the whole batch.
LossPart unsupervised_loss_from_teacher(const ModelState& student, std::span<const Clip> clips,
                                        const std::vector<std::vector<double>>& teacher_probs, double delta,
                                        bool strong_spatial, Rng& rng);
LossPart unsupervised_loss(const ModelState& student, const ModelState& teacher, std::span<const Clip> clips,
                           double delta, Rng& rng, bool strong_spatial = true);

/// Inputs of one mixed-consistency evaluation, drawn up front so the loss
/// can be recomputed independently.
struct TTMixPlan {
  std::vector<int> perm;          // shuffled partner of sample i is perm[i]
  std::vector<Clip> view_u;       // spatially augmented originals
  std::vector<Clip> view_s;       // temporally warped partners
  std::vector<Clip> mixed;
  std::vector<TokenMask> masks;   // token strategies only; one per mixed clip
  std::vector<double> lambdas;    // effective ratio per mixed clip
};

TTMixPlan plan_ttmix(std::span<const Clip> clips, const SSLConfig& config, int patch, Rng& rng);

struct TTMixResult {
  Tensor loss;
  double q = 0.0;
  double lambda_eff = 0.0;
  bool skipped = false;
  std::string warning;
};

/// Loss for a fixed plan; `teacher_probs[i]` is the teacher distribution of
/// clip i in the original order.
TTMixResult ttmix_loss_from_plan(const ModelState& student, const TTMixPlan& plan,
                                 const std::vector<std::vector<double>>& teacher_probs, const SSLConfig& config,
                                 Rng& rng);
TTMixResult ttmix_consistency_loss(const ModelState& student, const ModelState& teacher,
                                   std::span<const Clip> clips, const SSLConfig& config, Rng& rng);

/// teacher <- m * teacher + (1 - m) * student.
void ema_update(ParamSet& teacher, const ParamSet& student, double m);

double total_loss(double loss_s, double loss_un, double loss_mix, double gamma1, double gamma2);
Tensor total_loss(const Tensor& loss_s, const Tensor& loss_un, const Tensor& loss_mix, double gamma1, double gamma2);

/// base_lr * 0.1^(number of drop epochs <= epoch).
double lr_at(int epoch, const SSLConfig& config);

struct TrainBatch {
  std::vector<Clip> labeled;
  std::vector<int> labels;
  std::vector<Clip> unlabeled;
};

struct StepMetrics {
  double loss_s = 0.0;
  double loss_un = 0.0;
  double loss_mix = 0.0;
  double total = 0.0;
  double q = 0.0;
  double lambda_eff = 0.0;
  double lr = 0.0;
  bool labeled_empty = false;
  bool mix_skipped = false;
};

/// One optimisation step: losses, backward on the weighted total, SGD, then
/// the teacher update. Throws NumericError (before touching parameters) when
/// the total loss is non-finite.
StepMetrics train_step(ModelState& student, ModelState& teacher, const TrainBatch& batch, const SSLConfig& config,
                       double lr, Rng& rng);

/// The supervised-only reference step used by ablation checks.
StepMetrics supervised_step(ModelState& student, const TrainBatch& batch, const SSLConfig& config, double lr,
                            Rng& rng);

struct EvalReport {
  double top1 = 0.0;  // percent
  double top5 = 0.0;  // percent
  std::int64_t videos = 0;
  int clips_per_video = 0;
  int crops_per_video = 0;
  std::int64_t views_evaluated = 0;
};

/// Evaluation view layout: temporal windows spaced evenly over the video,
/// crops spaced evenly across a 1.25x rescale (a single crop is the plain frame).
std::vector<Clip> evaluation_views(const Clip& video, const ModelConfig& config, int n_clips, int n_crops);

/// Averages softmax over n_clips x n_crops views per video.
EvalReport evaluate(const ModelState& model, std::span<const VideoSample> dataset, int n_clips, int n_crops);

}  // namespace svf
