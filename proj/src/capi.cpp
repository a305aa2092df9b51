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

#include "svf/svf.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <tuple>

#include "svf/checkpoint.hpp"
#include "svf/config.hpp"
#include "svf/data.hpp"
#include "svf/errors.hpp"
#include "svf/trainer.hpp"

struct svf_dataset {
  svf::DatasetMeta meta;
  std::vector<svf::VideoSample> samples;
};

struct svf_config {
  svf::RunConfig config;
};

struct svf_model {
  svf::ModelState state;
};

namespace {

thread_local std::string g_last_error;

svf_status fail(svf_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Maps the core's exception types onto status codes.
template <class F>
svf_status guarded(F&& body) {
  try {
    body();
    return SVF_OK;
  } catch (const svf::ConfigError& e) {
    return fail(SVF_ERR_CONFIG, e.what());
  } catch (const svf::FormatError& e) {
    return fail(SVF_ERR_FORMAT, e.what());
  } catch (const svf::StructuralError& e) {
    return fail(SVF_ERR_STRUCTURE, e.what());
  } catch (const svf::IoError& e) {
    return fail(SVF_ERR_IO, e.what());
  } catch (const svf::NumericError& e) {
    return fail(SVF_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SVF_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(SVF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(SVF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SVF_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

svf_eval_result to_c(const svf::EvalReport& r) {
  return {r.top1, r.top5, r.videos, r.views_evaluated, r.clips_per_video, r.crops_per_video};
}

#define SVF_REQUIRE(cond, msg) \
  do {                         \
    if (!(cond)) return fail(SVF_ERR_ARGUMENT, msg); \
  } while (0)

}  // namespace

extern "C" {

const char* svf_last_error(void) { return g_last_error.c_str(); }

const char* svf_version(void) { return "0.1.0"; }

void svf_string_free(char* s) { std::free(s); }

svf_status svf_dataset_generate(uint32_t per_class, uint64_t seed, uint32_t frames, svf_dataset** out) {
  SVF_REQUIRE(out != nullptr, "null output handle");
  SVF_REQUIRE(per_class >= 1, "per_class must be >= 1");
  SVF_REQUIRE(frames >= 1, "frames must be >= 1");
  return guarded([&] {
    svf::GeneratorOptions opts;
    opts.frames = static_cast<int>(frames);
    auto ds = std::make_unique<svf_dataset>();
    ds->samples = svf::generate_dataset(static_cast<int>(per_class), seed, opts);
    ds->meta = svf::make_meta(ds->samples, seed);
    *out = ds.release();
  });
}

svf_status svf_dataset_load(const char* path, svf_dataset** out) {
  SVF_REQUIRE(path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    auto ds = std::make_unique<svf_dataset>();
    std::tie(ds->meta, ds->samples) = svf::load_dataset(path);
    *out = ds.release();
  });
}

svf_status svf_dataset_save(const svf_dataset* dataset, const char* path) {
  SVF_REQUIRE(dataset != nullptr && path != nullptr, "null argument");
  return guarded([&] { svf::save_dataset(path, dataset->meta, dataset->samples); });
}

svf_status svf_dataset_info_get(const svf_dataset* dataset, svf_dataset_info* info) {
  SVF_REQUIRE(dataset != nullptr && info != nullptr, "null argument");
  const auto& m = dataset->meta;
  info->n_samples = m.n_samples;
  info->frames = static_cast<uint32_t>(m.shape.frames);
  info->height = static_cast<uint32_t>(m.shape.height);
  info->width = static_cast<uint32_t>(m.shape.width);
  info->channels = static_cast<uint32_t>(m.shape.channels);
  info->n_classes = m.n_classes;
  info->seed = m.seed;
  info->n_labeled = 0;
  for (const auto& s : dataset->samples) info->n_labeled += s.label != svf::kUnlabeled ? 1U : 0U;
  return SVF_OK;
}

const char* svf_dataset_class_name(const svf_dataset* dataset, uint32_t index) {
  if (dataset == nullptr || index >= dataset->meta.class_names.size()) return nullptr;
  return dataset->meta.class_names[index].c_str();
}

void svf_dataset_free(svf_dataset* dataset) { delete dataset; }

svf_status svf_config_new(svf_config** out) {
  SVF_REQUIRE(out != nullptr, "null output handle");
  return guarded([&] { *out = new svf_config(); });
}

svf_status svf_config_clone(const svf_config* config, svf_config** out) {
  SVF_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = new svf_config(*config); });
}

svf_status svf_config_set(svf_config* config, const char* key, const char* value) {
  SVF_REQUIRE(config != nullptr && key != nullptr && value != nullptr, "null argument");
  return guarded([&] { svf::set_config_value(config->config, key, value); });
}

svf_status svf_config_merge_json(svf_config* config, const char* json) {
  SVF_REQUIRE(config != nullptr && json != nullptr, "null argument");
  return guarded([&] { svf::apply_json(config->config, json); });
}

svf_status svf_config_load_file(svf_config* config, const char* path) {
  SVF_REQUIRE(config != nullptr && path != nullptr, "null argument");
  return guarded([&] { svf::apply_json_file(config->config, path); });
}

svf_status svf_config_to_json(const svf_config* config, char** out) {
  SVF_REQUIRE(config != nullptr && out != nullptr, "null argument");
  return guarded([&] { *out = dup_string(svf::to_json(config->config)); });
}

svf_status svf_config_validate(const svf_config* config) {
  SVF_REQUIRE(config != nullptr, "null argument");
  return guarded([&] {
    try {
      config->config.validate();
    } catch (const std::invalid_argument& e) {
      throw svf::ConfigError("", e.what());
    }
  });
}

int svf_config_has_key(const char* key) { return key != nullptr && svf::is_config_key(key) ? 1 : 0; }

size_t svf_config_key_count(void) { return svf::config_keys().size(); }

const char* svf_config_key_name(size_t index) {
  const auto& keys = svf::config_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

void svf_config_free(svf_config* config) { delete config; }

svf_status svf_train(const svf_config* config, svf_epoch_callback callback, void* user, svf_eval_result* final_val) {
  SVF_REQUIRE(config != nullptr, "null argument");
  return guarded([&] {
    try {
      config->config.validate();
    } catch (const std::invalid_argument& e) {
      throw svf::ConfigError("", e.what());
    }
    svf::EpochCallback cb;
    if (callback != nullptr) {
      cb = [callback, user](const svf::EpochRecord& r) {
        const svf_epoch_metrics m{r.epoch,  r.loss_s, r.loss_un,  r.loss_mix, r.q_mean,
                                  r.lambda_mean, r.lr, r.val_top1, r.val_top5, r.wall_s};
        callback(&m, user);
      };
    }
    const auto result = svf::run_training(config->config, cb);
    if (final_val != nullptr) *final_val = to_c(result.final_val);
  });
}

svf_status svf_model_load(const svf_config* config, const char* checkpoint_path, svf_model** out) {
  SVF_REQUIRE(config != nullptr && checkpoint_path != nullptr && out != nullptr, "null argument");
  return guarded([&] {
    try {
      config->config.model.validate();
    } catch (const std::invalid_argument& e) {
      throw svf::ConfigError("", e.what());
    }
    *out = new svf_model{svf::load_model(config->config.model, checkpoint_path)};
  });
}

svf_status svf_model_evaluate(const svf_model* model, const svf_dataset* dataset, int32_t n_clips, int32_t n_crops,
                              svf_eval_result* result) {
  SVF_REQUIRE(model != nullptr && dataset != nullptr && result != nullptr, "null argument");
  return guarded([&] {
    for (const auto& s : dataset->samples) {
      if (!(s.clip.shape() == model->state.config.clip_shape())) {
        throw svf::StructuralError("dataset clip shape does not match the model configuration");
      }
    }
    *result = to_c(svf::evaluate(model->state, dataset->samples, n_clips, n_crops));
  });
}

void svf_model_free(svf_model* model) { delete model; }

}  // extern "C"
