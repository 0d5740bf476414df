// Copyright (c) 2026 The gradstyle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of the gradstyle library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a gsa_status; on failure gsa_last_error()
 * describes the problem (thread-local, valid until the next failing call on
 * the same thread). Optional string arguments may be NULL or empty.
 */

#ifndef GRADSTYLE_GRADSTYLE_H_
#define GRADSTYLE_GRADSTYLE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GSA_API __declspec(dllexport)
#elif defined(GSA_BUILDING_LIBRARY)
#define GSA_API __attribute__((visibility("default")))
#else
#define GSA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gsa_status {
  GSA_OK = 0,
  GSA_ERR_INVALID_ARGUMENT = 1,
  GSA_ERR_IO = 2,
  GSA_ERR_FORMAT = 3,
  GSA_ERR_UNSUPPORTED = 4,
  GSA_ERR_DEGENERATE_INPUT = 5,
  GSA_ERR_CONFIGURATION = 6,
  GSA_ERR_BOUNDS = 7,
  GSA_ERR_TRAINING = 8,
  GSA_ERR_DATA = 9,
  GSA_ERR_VERSION = 10,
  GSA_ERR_USAGE = 11,
  GSA_ERR_DEGENERATE_OUTPUT = 12,
  GSA_ERR_INTERNAL = 100
} gsa_status;

typedef struct gsa_string gsa_string;
typedef struct gsa_config gsa_config;
typedef struct gsa_audio gsa_audio;
typedef struct gsa_mel gsa_mel;
typedef struct gsa_model gsa_model;

GSA_API const char* gsa_version(void);
GSA_API const char* gsa_status_name(gsa_status status);
GSA_API const char* gsa_last_error(void);

typedef void (*gsa_log_fn)(const char* message, void* user);
/* Receives progress and warning lines from long-running commands. */
GSA_API void gsa_set_log_callback(gsa_log_fn fn, void* user);

/* ---- strings ---------------------------------------------------------- */

GSA_API const char* gsa_string_data(const gsa_string* s);
GSA_API size_t gsa_string_size(const gsa_string* s);
GSA_API void gsa_string_free(gsa_string* s);

/* ---- configuration ---------------------------------------------------- */

GSA_API gsa_status gsa_config_default(gsa_config** out);
/* Small dimensions for the bundled toy corpus. */
GSA_API gsa_status gsa_config_toy(gsa_config** out);
GSA_API gsa_status gsa_config_load(const char* path, gsa_config** out);
/* Keys are "section.name", e.g. "train.seed". Unknown keys are rejected. */
GSA_API gsa_status gsa_config_set(gsa_config* cfg, const char* key,
                                  const char* value);
GSA_API gsa_status gsa_config_get(const gsa_config* cfg, const char* key,
                                  gsa_string** out);
/* Validates the configuration and fills derived dimensions. */
GSA_API gsa_status gsa_config_resolve(gsa_config* cfg);
GSA_API gsa_status gsa_config_to_text(const gsa_config* cfg, gsa_string** out);
GSA_API gsa_status gsa_config_save(const gsa_config* cfg, const char* path);
GSA_API void gsa_config_free(gsa_config* cfg);

/* ---- audio and mels --------------------------------------------------- */

GSA_API gsa_status gsa_audio_load(const char* path, gsa_audio** out);
GSA_API gsa_status gsa_audio_from_samples(const double* samples, size_t n,
                                          int sample_rate_hz, gsa_audio** out);
GSA_API gsa_status gsa_audio_save(const gsa_audio* audio, const char* path);
GSA_API size_t gsa_audio_num_samples(const gsa_audio* audio);
GSA_API int gsa_audio_sample_rate(const gsa_audio* audio);
GSA_API const double* gsa_audio_samples(const gsa_audio* audio);
GSA_API void gsa_audio_free(gsa_audio* audio);

/* The audio must already be at the configured sample rate. */
GSA_API gsa_status gsa_mel_compute(const gsa_audio* audio,
                                   const gsa_config* cfg, gsa_mel** out);
GSA_API gsa_status gsa_mel_load(const char* path, const gsa_config* cfg,
                                gsa_mel** out);
GSA_API gsa_status gsa_mel_save(const gsa_mel* mel, const char* path);
GSA_API int gsa_mel_frames(const gsa_mel* mel);
GSA_API int gsa_mel_bins(const gsa_mel* mel);
/* Row-major frames x bins, natural-log energies. */
GSA_API const double* gsa_mel_data(const gsa_mel* mel);
GSA_API void gsa_mel_free(gsa_mel* mel);

/* ---- models ----------------------------------------------------------- */

GSA_API gsa_status gsa_model_load(const char* path, gsa_model** out);
/* Copy of the configuration stored with the model. */
GSA_API gsa_status gsa_model_config(const gsa_model* model, gsa_config** out);
/* Only "eval.*" keys may change after training. */
GSA_API gsa_status gsa_model_set(gsa_model* model, const char* key,
                                 const char* value);
GSA_API int gsa_model_step(const gsa_model* model);
GSA_API size_t gsa_model_num_parameters(const gsa_model* model);
GSA_API void gsa_model_free(gsa_model* model);

/* ---- commands --------------------------------------------------------- */
/* Each command returns a textual report in *report (may be NULL). */

GSA_API gsa_status gsa_preprocess(const gsa_config* cfg, const char* manifest,
                                  const char* outdir, gsa_string** report);

typedef struct gsa_segment_options {
  const char* mode; /* "timestamps", "attention" or "random" */
  const char* audio;
  const char* mel;
  const char* timestamps;
  const char* attention;
  uint64_t seed;
  int min_frames; /* 0: configured value */
  const char* plot;
} gsa_segment_options;

GSA_API gsa_status gsa_segment(const gsa_config* cfg,
                               const gsa_segment_options* opts,
                               gsa_string** report);

GSA_API gsa_status gsa_train(const gsa_config* cfg, const char* manifest,
                             const char* outdir, gsa_string** report);

typedef struct gsa_reference {
  const char* audio;
  const char* timestamps;
  const char* attention;
  uint64_t seed; /* random_slices models only */
} gsa_reference;

typedef struct gsa_synth_options {
  const char* text;
  gsa_reference reference;
  const char* out_mel;
  const char* out_wav;
  const char* overrides; /* "word=weight,word#2=weight" */
} gsa_synth_options;

GSA_API gsa_status gsa_synthesize(const gsa_model* model,
                                  const gsa_synth_options* opts,
                                  gsa_string** report);

typedef struct gsa_eval_options {
  const char* manifest;
  const char* outdir;
  const char* hyp_dir;
  const char* other_reference;
  const char* pos_override; /* comma-separated tags, e.g. "ADJ,NOUN" */
  int plot;
} gsa_eval_options;

GSA_API gsa_status gsa_evaluate(const gsa_model* model,
                                const gsa_eval_options* opts,
                                gsa_string** report);

typedef struct gsa_inspect_options {
  gsa_reference reference;
  const char* outdir;
  const char* overrides;
  int plot;
} gsa_inspect_options;

GSA_API gsa_status gsa_inspect(const gsa_model* model,
                               const gsa_inspect_options* opts,
                               gsa_string** report);

GSA_API gsa_status gsa_embed(const gsa_config* cfg, const char* wav,
                             const char* out, gsa_string** report);

GSA_API gsa_status gsa_make_toy_corpus(const char* outdir, uint64_t seed,
                                       gsa_string** report);

/* Finite-difference check of one component ("lse", "gse", "end_to_end",
 * ...). */
GSA_API gsa_status gsa_grad_check(const char* selector, uint64_t seed,
                                  double* max_rel_error);

#ifdef __cplusplus
}
#endif

#endif /* GRADSTYLE_GRADSTYLE_H_ */
