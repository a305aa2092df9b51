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

#include <string>
#include <vector>

#include "svf/model.hpp"
#include "svf/params.hpp"

namespace svf {

// Checkpoint layout (little-endian):
//   "SVFC" | version u32 = 1 | entry count u32
//   per entry: name length u16 | UTF-8 name | rank u8 | dims u32 x rank | float32 values

struct CheckpointEntry {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

std::string encode_checkpoint(const ParamSet& params);
std::vector<CheckpointEntry> decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const ParamSet& params);
std::vector<CheckpointEntry> read_checkpoint(const std::string& path);

/// Copies checkpoint values into `params`. Throws StructuralError when names
/// or shapes differ from the live parameter set.
void assign_checkpoint(ParamSet& params, const std::vector<CheckpointEntry>& entries);

/// Builds a fresh model for `config` and loads `path` into it.
ModelState load_model(const ModelConfig& config, const std::string& path);

}  // namespace svf
