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
#include <string>
#include <vector>

#include "svf/model.hpp"
#include "svf/ssl.hpp"

namespace svf {

/// Everything a training or evaluation run needs. Serialized as one flat
/// JSON object whose keys are listed by config_keys().
struct RunConfig {
  ModelConfig model = ModelConfig::s_toy();
  SSLConfig ssl;

  std::string data;      // training set (SVDS)
  std::string val_data;  // optional; a per-class holdout of `data` otherwise
  std::string out_dir = "run";
  std::uint64_t seed = 0;
  double label_rate = 0.05;
  double val_fraction = 0.2;  // only used without val_data
  int eval_clips = 1;
  int eval_crops = 1;
  int ckpt_every = 10;        // epochs between checkpoints; 0 = final only
  int steps_per_epoch = 0;    // 0 = one pass over the longer of the two streams
  bool eval_teacher = false;  // validate the teacher instead of the student
  /// Record elapsed seconds in the metrics stream. Off by default so that
  /// reruns of a frozen config give byte-identical metrics.
  bool wall_clock = false;

  void validate() const;
};

/// Flat key names, in serialization order.
const std::vector<std::string>& config_keys();
bool is_config_key(const std::string& key);

/// Applies a JSON object. Unknown keys or mistyped values throw ConfigError
/// naming the key; keys not present keep their current value.
void apply_json(RunConfig& config, const std::string& json_text);
void apply_json_file(RunConfig& config, const std::string& path);

/// Sets one key from its command-line spelling ("0.3", "true", "tube",
/// "25,28", ...).
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// Canonical JSON (fixed key order, two-space indent).
std::string to_json(const RunConfig& config);

}  // namespace svf
