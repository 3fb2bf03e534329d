// Copyright 2026 The DIMNet-Toy Authors. All Rights Reserved.
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

/* C interface to the DIMNet-Toy library. Every call returns a dimnet_status;
 * on failure dimnet_last_error() holds a one-line reason for the calling
 * thread until its next call. */
#ifndef DIMNET_DIMNET_H_
#define DIMNET_DIMNET_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DIMNET_API __declspec(dllexport)
#else
#define DIMNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  DIMNET_OK = 0,
  DIMNET_E_CONFIG = 1,
  DIMNET_E_SHAPE = 2,
  DIMNET_E_PARSE = 3,
  DIMNET_E_LEXICON_MISS = 4,
  DIMNET_E_INDEX = 5,
  DIMNET_E_NUMERICS = 6,
  DIMNET_E_ALL_BLANK = 7,
  DIMNET_E_IO = 8,
  DIMNET_E_INVALID_ARGUMENT = 9,
  DIMNET_E_INTERNAL = 100
} dimnet_status;

typedef struct dimnet_config dimnet_config;
typedef struct dimnet_model dimnet_model;

DIMNET_API const char* dimnet_last_error(void);
DIMNET_API const char* dimnet_status_name(dimnet_status s);
DIMNET_API const char* dimnet_version(void);

/* Config: defaults, then a file, then key=value overrides. */
DIMNET_API dimnet_status dimnet_config_new(dimnet_config** out);
DIMNET_API void dimnet_config_free(dimnet_config* cfg);
DIMNET_API dimnet_status dimnet_config_load(dimnet_config* cfg, const char* path);
DIMNET_API dimnet_status dimnet_config_set(dimnet_config* cfg, const char* key,
                                           const char* value);
/* Copies a NUL-terminated string into buf when it fits; *needed (if
 * non-NULL) receives the length including the terminator. */
DIMNET_API dimnet_status dimnet_config_get(const dimnet_config* cfg, const char* key,
                                           char* buf, size_t len, size_t* needed);
DIMNET_API dimnet_status dimnet_config_to_text(const dimnet_config* cfg, char* buf,
                                               size_t len, size_t* needed);
DIMNET_API dimnet_status dimnet_config_describe(char* buf, size_t len, size_t* needed);
DIMNET_API dimnet_status dimnet_config_validate(const dimnet_config* cfg);

/* Pipeline commands. Each writes into out_dir and echoes its config there. */
DIMNET_API dimnet_status dimnet_gen_data(const dimnet_config* cfg, const char* out_dir);
DIMNET_API dimnet_status dimnet_train(const dimnet_config* cfg, const char* corpus_dir,
                                      const char* out_dir);
DIMNET_API dimnet_status dimnet_decode(const dimnet_config* cfg, const char* checkpoint,
                                       const char* corpus_dir, const char* split,
                                       const char* out_dir, double* wer);
DIMNET_API dimnet_status dimnet_eval(const dimnet_config* cfg, const char* checkpoint,
                                     const char* corpus_dir, const char* split,
                                     const char* out_dir, int top_k, double* wer,
                                     double* ar_acc);
/* grid: "key=v1,v2;key2=v3". seeds: n_seeds values. */
DIMNET_API dimnet_status dimnet_ablate(const dimnet_config* cfg, const char* corpus_dir,
                                       const char* grid, const uint64_t* seeds,
                                       size_t n_seeds, const char* out_dir);
/* Runs the finite-difference suite; report (optional) receives one line per
 * check. */
DIMNET_API dimnet_status dimnet_grad_check(uint64_t seed, double* max_rel_err,
                                           char* report, size_t len, size_t* needed);

/* Model handle for per-utterance use. */
DIMNET_API dimnet_status dimnet_model_load(const char* checkpoint, const dimnet_config* cfg,
                                           dimnet_model** out);
DIMNET_API void dimnet_model_free(dimnet_model* model);
DIMNET_API dimnet_status dimnet_model_num_params(const dimnet_model* model, int64_t* n);
/* frames: T x feat_dim row-major. best_len receives the hypothesis length;
 * best may be NULL to query it. */
DIMNET_API dimnet_status dimnet_model_decode(const dimnet_model* model, const float* frames,
                                             int32_t num_frames, int32_t feat_dim,
                                             int32_t* best, size_t best_cap, size_t* best_len,
                                             int32_t* accent);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* DIMNET_DIMNET_H_ */
