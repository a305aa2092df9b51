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

#include <functional>
#include <string>
#include <vector>

#include "svf/config.hpp"
#include "svf/data.hpp"
#include "svf/ssl.hpp"

namespace svf {

/// One line of the metrics stream. Loss and diagnostic fields are means
/// over the steps of the epoch.
struct EpochRecord {
  int epoch = 0;
  double loss_s = 0.0;
  double loss_un = 0.0;
  double loss_mix = 0.0;
  double q_mean = 0.0;
  double lambda_mean = 0.0;
  double lr = 0.0;
  double val_top1 = 0.0;
  double val_top5 = 0.0;
  double wall_s = 0.0;
};

/// Single JSON object, newline-terminated, fixed key order.
std::string metrics_line(const EpochRecord& record);

using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainResult {
  std::vector<EpochRecord> epochs;
  EvalReport final_val;
  ModelState student;
  ModelState teacher;
  int steps = 0;
};

/// Trains on in-memory data. `out_dir` empty means no files are written;
/// otherwise config.json, metrics.jsonl, status.json and the student and
/// teacher checkpoints go there. A non-finite loss marks status.json as
/// aborted and rethrows NumericError; checkpoints already written stay.
TrainResult run_training(const RunConfig& config, const std::vector<VideoSample>& train_set,
                         const std::vector<VideoSample>& val_set, const std::string& out_dir,
                         const EpochCallback& on_epoch = {});

/// Loads config.data (and config.val_data, or holds out a validation split)
/// and trains into config.out_dir.
TrainResult run_training(const RunConfig& config, const EpochCallback& on_epoch = {});

}  // namespace svf
