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

#include "svf/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "binary_io.hpp"
#include "json.hpp"
#include "svf/checkpoint.hpp"
#include "svf/errors.hpp"

namespace svf {

namespace {

using json = nlohmann::ordered_json;

// Endless pass over a sample list, reshuffled each time it wraps.
class SampleStream {
 public:
  SampleStream(const std::vector<VideoSample>& samples, std::uint64_t seed) : samples_(samples), rng_(seed) {
    order_.resize(samples.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    reshuffle();
  }

  const VideoSample& next() {
    if (pos_ == order_.size()) reshuffle();
    return samples_[order_[pos_++]];
  }
  bool empty() const { return samples_.empty(); }

 private:
  void reshuffle() {
    rng_.shuffle(std::span<std::size_t>(order_));
    pos_ = 0;
  }

  const std::vector<VideoSample>& samples_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
};

void write_status(const std::string& out_dir, const std::string& status, int epochs_done, int steps,
                  const std::string& reason) {
  if (out_dir.empty()) return;
  json doc = json::object();
  doc["status"] = status;
  doc["epochs_completed"] = epochs_done;
  doc["steps"] = steps;
  if (!reason.empty()) doc["reason"] = reason;
  detail::write_file_atomic(out_dir + "/status.json", doc.dump(2) + "\n");
}

void check_dataset(const std::vector<VideoSample>& samples, const ModelConfig& model, const char* which) {
  for (const auto& s : samples) {
    if (!(s.clip.shape() == model.clip_shape())) {
      throw std::invalid_argument(std::string(which) + " clip shape does not match the model configuration");
    }
  }
}

// Stream ids for derive_seed, fixed so runs stay comparable across settings.
enum : std::uint64_t { kInitStream = 1, kSplitStream = 2, kHoldoutStream = 3, kLabeledStream = 4,
                       kUnlabeledStream = 5, kStepStream = 6 };

}  // namespace

std::string metrics_line(const EpochRecord& r) {
  json doc = json::object();
  doc["epoch"] = r.epoch;
  doc["loss_s"] = r.loss_s;
  doc["loss_un"] = r.loss_un;
  doc["loss_mix"] = r.loss_mix;
  doc["q_mean"] = r.q_mean;
  doc["lambda_mean"] = r.lambda_mean;
  doc["lr"] = r.lr;
  doc["val_top1"] = r.val_top1;
  doc["val_top5"] = r.val_top5;
  doc["wall_s"] = r.wall_s;
  for (const auto& [k, v] : doc.items()) {
    if (v.is_number_float() && !std::isfinite(v.get<double>())) {
      throw NumericError("non-finite metric '" + k + "'");
    }
  }
  return doc.dump() + "\n";
}

TrainResult run_training(const RunConfig& config, const std::vector<VideoSample>& train_set,
                         const std::vector<VideoSample>& val_set, const std::string& out_dir,
                         const EpochCallback& on_epoch) {
  config.validate();
  const ModelConfig& mc = config.model;
  check_dataset(train_set, mc, "training");
  check_dataset(val_set, mc, "validation");
  if (val_set.empty()) throw std::invalid_argument("validation set is empty");

  std::vector<VideoSample> labeled_pool, unlabeled;
  for (const auto& s : train_set) (s.label == kUnlabeled ? unlabeled : labeled_pool).push_back(s);
  for (const auto& s : labeled_pool) {
    if (s.label < 0 || s.label >= mc.n_classes) throw std::invalid_argument("training label out of range");
  }
  LabelSplit split = split_labeled(labeled_pool, config.label_rate, derive_seed(config.seed, kSplitStream));
  for (auto& s : split.unlabeled) unlabeled.push_back(std::move(s));
  const std::vector<VideoSample>& labeled = split.labeled;

  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    detail::write_file_atomic(out_dir + "/config.json", to_json(config));
  }
  std::ofstream metrics;
  if (!out_dir.empty()) {
    metrics.open(out_dir + "/metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics) throw IoError("cannot write " + out_dir + "/metrics.jsonl");
  }

  TrainResult result{{}, {}, init_model(mc, derive_seed(config.seed, kInitStream)), {}, 0};
  result.teacher = result.student.clone();
  const SSLConfig& ssl = config.ssl;

  SampleStream labeled_stream(labeled, derive_seed(config.seed, kLabeledStream));
  SampleStream unlabeled_stream(unlabeled, derive_seed(config.seed, kUnlabeledStream));
  Rng step_rng(derive_seed(config.seed, kStepStream));

  // Default epoch: one pass over the larger of the two streams.
  auto passes = [](std::size_t n, int per_step) {
    return per_step > 0 ? static_cast<int>((n + static_cast<std::size_t>(per_step) - 1) / static_cast<std::size_t>(per_step))
                        : 0;
  };
  const int steps_per_epoch = config.steps_per_epoch > 0
                                  ? config.steps_per_epoch
                                  : std::max(passes(labeled.size(), ssl.B_l), passes(unlabeled.size(), ssl.B_u));
  const auto start = std::chrono::steady_clock::now();
  write_status(out_dir, "running", 0, 0, "");

  auto save_checkpoints = [&] {
    if (out_dir.empty()) return;
    save_checkpoint(out_dir + "/student.svfc", result.student.params);
    save_checkpoint(out_dir + "/teacher.svfc", result.teacher.params);
  };

  for (int epoch = 0; epoch < ssl.epochs; ++epoch) {
    const double lr = lr_at(epoch, ssl);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    int mix_steps = 0;
    for (int s = 0; s < steps_per_epoch; ++s) {
      TrainBatch batch;
      for (int i = 0; i < ssl.B_l && !labeled_stream.empty(); ++i) {
        const auto& v = labeled_stream.next();
        batch.labeled.push_back(v.clip);
        batch.labels.push_back(v.label);
      }
      for (int i = 0; i < ssl.B_u && !unlabeled_stream.empty(); ++i) batch.unlabeled.push_back(unlabeled_stream.next().clip);

      StepMetrics m;
      try {
        m = train_step(result.student, result.teacher, batch, ssl, lr, step_rng);
      } catch (const NumericError& e) {
        write_status(out_dir, "aborted", epoch, result.steps, e.what());
        throw;
      }
      ++result.steps;
      rec.loss_s += m.loss_s;
      rec.loss_un += m.loss_un;
      rec.loss_mix += m.loss_mix;
      if (!m.mix_skipped && ssl.gamma2 != 0.0) {
        rec.q_mean += m.q;
        rec.lambda_mean += m.lambda_eff;
        ++mix_steps;
      }
    }
    const double n = static_cast<double>(std::max(steps_per_epoch, 1));
    rec.loss_s /= n;
    rec.loss_un /= n;
    rec.loss_mix /= n;
    if (mix_steps > 0) {
      rec.q_mean /= mix_steps;
      rec.lambda_mean /= mix_steps;
    }
    const ModelState& judged = config.eval_teacher ? result.teacher : result.student;
    result.final_val = evaluate(judged, val_set, config.eval_clips, config.eval_crops);
    rec.val_top1 = result.final_val.top1;
    rec.val_top5 = result.final_val.top5;
    if (config.wall_clock) {
      rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    if (metrics.is_open()) {
      metrics << metrics_line(rec);
      metrics.flush();
    }
    result.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    const bool last = epoch + 1 == ssl.epochs;
    if (last || (config.ckpt_every > 0 && (epoch + 1) % config.ckpt_every == 0)) save_checkpoints();
    write_status(out_dir, last ? "completed" : "running", epoch + 1, result.steps, "");
  }
  return result;
}

TrainResult run_training(const RunConfig& config, const EpochCallback& on_epoch) {
  if (config.data.empty()) throw ConfigError("data", "config key 'data' is required for training");
  auto [meta, train_set] = load_dataset(config.data);
  std::vector<VideoSample> val_set;
  if (!config.val_data.empty()) {
    val_set = load_dataset(config.val_data).second;
  } else {
    auto [rest, held] = holdout_split(train_set, config.val_fraction, derive_seed(config.seed, kHoldoutStream));
    train_set = std::move(rest);
    val_set = std::move(held);
  }
  return run_training(config, train_set, val_set, config.out_dir, on_epoch);
}

}  // namespace svf
