/*
 * Copyright 2026 The radfall Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* radfall: radar point-cloud fall detection. Stable C interface. */

#ifndef RADFALL_RADFALL_H_
#define RADFALL_RADFALL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(RADFALL_BUILDING_LIBRARY)
#define RADFALL_API __attribute__((visibility("default")))
#else
#define RADFALL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rf_status {
  RF_OK = 0,
  RF_ERR_INVALID_ARGUMENT = 1,
  RF_ERR_IO = 2,
  RF_ERR_PARSE = 3,
  RF_ERR_FORMAT = 4,
  RF_ERR_VERSION = 5,
  RF_ERR_DOMAIN = 6,
  RF_ERR_NUMERICAL = 7,
  RF_ERR_INTERNAL = 8
} rf_status;

/* Message of the last failed call on this thread; "" after a success. */
RADFALL_API const char* rf_last_error(void);
RADFALL_API const char* rf_status_name(rf_status status);
RADFALL_API const char* rf_version(void);
/* Releases strings returned through char** out-parameters. */
RADFALL_API void rf_string_free(char* text);

/* ---- frame streams and labels ---------------------------------------- */

typedef struct rf_stream rf_stream;
typedef struct rf_labels rf_labels;

/* Reads a JSON Lines stream. With filter_target != 0 only frames of
 * target_id are kept. */
RADFALL_API rf_status rf_stream_read(const char* path, int filter_target, int64_t target_id, rf_stream** out);
RADFALL_API rf_status rf_stream_write(const rf_stream* stream, const char* path);
RADFALL_API size_t rf_stream_size(const rf_stream* stream);
/* Frame index and centroid height of frame i. */
RADFALL_API rf_status rf_stream_frame(const rf_stream* stream, size_t i, int64_t* frame_index, double* height);
RADFALL_API void rf_stream_free(rf_stream* stream);

RADFALL_API rf_status rf_labels_read(const char* path, rf_labels** out);
RADFALL_API rf_status rf_labels_write(const rf_labels* labels, const char* path);
RADFALL_API size_t rf_labels_size(const rf_labels* labels);
RADFALL_API int64_t rf_labels_get(const rf_labels* labels, size_t i);
RADFALL_API void rf_labels_free(rf_labels* labels);

/* ---- simulation ------------------------------------------------------- */

/* config_json: {"seed": int, "tilt": radians, "height": meters,
 *   "recipe": {"<motion>": count, ...} or "preset": "adl"|"single"|"benchmark",
 *   "scale": int, "simulator": {overrides}}.
 * segments_json (optional) receives the segment log. */
/* Default simulator parameters as a JSON object (the keys "simulator" accepts). */
RADFALL_API rf_status rf_simulator_default_config_json(char** out);
RADFALL_API rf_status rf_simulate(const char* config_json, rf_stream** frames, rf_labels** labels,
                                  char** segments_json);

/* ---- preprocessing ---------------------------------------------------- */

typedef struct rf_patterns rf_patterns;

/* config_json: {"tilt", "height", "length", "points", "stride", "seed"};
 * missing keys take their defaults. The stream must hold one target. */
RADFALL_API rf_status rf_patterns_build(const rf_stream* stream, const char* config_json, rf_patterns** out);
RADFALL_API rf_status rf_patterns_read(const char* path, rf_patterns** out);
RADFALL_API rf_status rf_patterns_write(const rf_patterns* patterns, const char* path);
RADFALL_API size_t rf_patterns_size(const rf_patterns* patterns);
/* Frames per pattern and points per frame of the first pattern. */
RADFALL_API rf_status rf_patterns_shape(const rf_patterns* patterns, int* length, int* points);
RADFALL_API void rf_patterns_free(rf_patterns* patterns);

/* ---- models ----------------------------------------------------------- */

typedef struct rf_model rf_model;
typedef void (*rf_epoch_callback)(int epoch, double mean_loss, void* user);

/* Default model config as a JSON object. */
RADFALL_API rf_status rf_model_default_config_json(char** out);
/* config_json holds model config keys; missing keys take their defaults. */
RADFALL_API rf_status rf_model_train(const rf_patterns* patterns, const char* config_json,
                                     rf_epoch_callback on_epoch, void* user, rf_model** out);
RADFALL_API rf_status rf_model_load(const char* path, rf_model** out);
RADFALL_API rf_status rf_model_save(const rf_model* model, const char* path);
/* Per-epoch mean loss of the training run that produced the model (empty
 * for loaded models). Writes min(capacity, length) values, sets *length. */
RADFALL_API rf_status rf_model_loss_history(const rf_model* model, double* values, size_t capacity, size_t* length);
RADFALL_API rf_status rf_model_config_json(const rf_model* model, char** out);
/* Switches scoring between a sampled latent (0) and the posterior mean (1). */
RADFALL_API rf_status rf_model_set_posterior_mean(rf_model* model, int enabled);
RADFALL_API void rf_model_free(rf_model* model);

/* ---- scoring and detection -------------------------------------------- */

typedef struct rf_scores rf_scores;
typedef struct rf_detections rf_detections;

RADFALL_API rf_status rf_score(rf_model* model, const rf_patterns* patterns, uint64_t seed, rf_scores** out);
RADFALL_API rf_status rf_scores_read(const char* path, rf_scores** out);
RADFALL_API rf_status rf_scores_write(const rf_scores* scores, const char* path);
RADFALL_API size_t rf_scores_size(const rf_scores* scores);
RADFALL_API rf_status rf_scores_get(const rf_scores* scores, size_t i, int64_t* frame_index, double* anomaly,
                                    double* drop);
/* Empirical quantile (0..1, nearest rank from below) of the anomaly levels. */
RADFALL_API rf_status rf_scores_quantile(const rf_scores* scores, double q, double* out);
RADFALL_API void rf_scores_free(rf_scores* scores);

RADFALL_API rf_status rf_detect(const rf_scores* scores, double anomaly_threshold, double drop_threshold,
                                rf_detections** out);
RADFALL_API rf_status rf_detections_write(const rf_detections* detections, const char* path);
RADFALL_API size_t rf_detections_size(const rf_detections* detections);
RADFALL_API size_t rf_detections_falls(const rf_detections* detections);
RADFALL_API void rf_detections_free(rf_detections* detections);

/* ---- evaluation and plots --------------------------------------------- */

typedef struct rf_roc rf_roc;

RADFALL_API rf_status rf_evaluate(const rf_scores* scores, const rf_labels* labels, double drop_threshold,
                                  int64_t half_window, rf_roc** out);
RADFALL_API rf_status rf_roc_write_csv(const rf_roc* roc, const char* path);
RADFALL_API rf_status rf_roc_write_svg(const rf_roc* roc, const char* title, const char* path);
RADFALL_API rf_status rf_roc_summary_json(const rf_roc* roc, char** out);
RADFALL_API rf_status rf_roc_auc(const rf_roc* roc, double* out);
RADFALL_API void rf_roc_free(rf_roc* roc);

/* Centroid height and anomaly level over time. stream and labels may be
 * NULL. */
RADFALL_API rf_status rf_plot_trace(const rf_stream* stream, const rf_scores* scores, const rf_labels* labels,
                                    const char* title, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* RADFALL_RADFALL_H_ */
