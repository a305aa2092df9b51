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

#ifndef SVF_SVF_H_
#define SVF_SVF_H_

#include <stddef.h>
#include <stdint.h>

#if defined(SVF_BUILDING_LIBRARY)
#define SVF_API __attribute__((visibility("default")))
#else
#define SVF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum svf_status {
  SVF_OK = 0,
  SVF_ERR_ARGUMENT = 1,  /* invalid argument or null handle */
  SVF_ERR_CONFIG = 2,    /* unknown key or bad value */
  SVF_ERR_IO = 3,        /* unreadable or unwritable path */
  SVF_ERR_FORMAT = 4,    /* malformed dataset or checkpoint file */
  SVF_ERR_STRUCTURE = 5, /* checkpoint does not fit the model */
  SVF_ERR_NUMERIC = 6,   /* non-finite loss or parameter */
  SVF_ERR_INTERNAL = 7
} svf_status;

typedef struct svf_dataset svf_dataset;
typedef struct svf_config svf_config;
typedef struct svf_model svf_model;

/* Message of the last failed call on this thread; never NULL. */
SVF_API const char* svf_last_error(void);
SVF_API const char* svf_version(void);
/* Frees strings returned through char** out-parameters. */
SVF_API void svf_string_free(char* s);

/* ---- datasets ---- */

typedef struct svf_dataset_info {
  uint32_t n_samples;
  uint32_t frames;
  uint32_t height;
  uint32_t width;
  uint32_t channels;
  uint32_t n_classes;
  uint64_t seed;
  uint32_t n_labeled; /* samples with a class label */
} svf_dataset_info;

SVF_API svf_status svf_dataset_generate(uint32_t per_class, uint64_t seed, uint32_t frames, svf_dataset** out);
SVF_API svf_status svf_dataset_load(const char* path, svf_dataset** out);
SVF_API svf_status svf_dataset_save(const svf_dataset* dataset, const char* path);
SVF_API svf_status svf_dataset_info_get(const svf_dataset* dataset, svf_dataset_info* info);
SVF_API const char* svf_dataset_class_name(const svf_dataset* dataset, uint32_t index);
SVF_API void svf_dataset_free(svf_dataset* dataset);

/* ---- run configuration ---- */

SVF_API svf_status svf_config_new(svf_config** out);
SVF_API svf_status svf_config_clone(const svf_config* config, svf_config** out);
/* Value uses the command-line spelling: "0.3", "true", "tube", "25,28". */
SVF_API svf_status svf_config_set(svf_config* config, const char* key, const char* value);
SVF_API svf_status svf_config_merge_json(svf_config* config, const char* json);
SVF_API svf_status svf_config_load_file(svf_config* config, const char* path);
SVF_API svf_status svf_config_to_json(const svf_config* config, char** out);
SVF_API svf_status svf_config_validate(const svf_config* config);
SVF_API int svf_config_has_key(const char* key);
SVF_API size_t svf_config_key_count(void);
SVF_API const char* svf_config_key_name(size_t index);
SVF_API void svf_config_free(svf_config* config);

/* ---- training and evaluation ---- */

typedef struct svf_epoch_metrics {
  int32_t epoch;
  double loss_s;
  double loss_un;
  double loss_mix;
  double q_mean;
  double lambda_mean;
  double lr;
  double val_top1;
  double val_top5;
  double wall_s;
} svf_epoch_metrics;

typedef struct svf_eval_result {
  double top1; /* percent */
  double top5; /* percent */
  int64_t videos;
  int64_t views;
  int32_t clips_per_video;
  int32_t crops_per_video;
} svf_eval_result;

typedef void (*svf_epoch_callback)(const svf_epoch_metrics* metrics, void* user);

/* Runs a full training job described by `config` (data, out_dir, ...).
   `callback` and `final_val` may be NULL. */
SVF_API svf_status svf_train(const svf_config* config, svf_epoch_callback callback, void* user,
                             svf_eval_result* final_val);

/* Model shape comes from `config`. */
SVF_API svf_status svf_model_load(const svf_config* config, const char* checkpoint_path, svf_model** out);
SVF_API svf_status svf_model_evaluate(const svf_model* model, const svf_dataset* dataset, int32_t n_clips,
                                      int32_t n_crops, svf_eval_result* result);
SVF_API void svf_model_free(svf_model* model);

#ifdef __cplusplus
}
#endif

#endif  // SVF_SVF_H_
