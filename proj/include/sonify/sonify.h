// Copyright 2026 The Sonify Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SONIFY_SONIFY_H_
#define SONIFY_SONIFY_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SONIFY_API __declspec(dllexport)
#else
#define SONIFY_API __attribute__((visibility("default")))
#endif

// Status codes. Every function returning sonify_status leaves a message
// for the calling thread in sonify_last_error() when it fails.
typedef enum sonify_status {
  SONIFY_OK = 0,
  SONIFY_E_DOMAIN = 1,
  SONIFY_E_OUT_OF_RANGE = 2,
  SONIFY_E_INVALID_ARGUMENT = 3,
  SONIFY_E_STATE = 4,
  SONIFY_E_CONFIG = 5,
  SONIFY_E_IO = 6,
  SONIFY_E_PARSE = 7,
  SONIFY_E_SCHEMA = 8,
  SONIFY_E_DEGENERATE = 9,
  SONIFY_E_INSUFFICIENT = 10,
  SONIFY_E_NETWORK = 11,
  SONIFY_E_INTERNAL = 99
} sonify_status;

typedef enum sonify_kind {
  SONIFY_FREQ = 0,
  SONIFY_AMP = 1,
  SONIFY_REVERB = 2,
  SONIFY_BRR = 3,
  SONIFY_SNR = 4
} sonify_kind;

SONIFY_API const char* sonify_version(void);
SONIFY_API const char* sonify_last_error(void);
SONIFY_API const char* sonify_status_name(sonify_status status);

// Strings returned through char** are owned by the caller.
SONIFY_API void sonify_string_free(char* s);

SONIFY_API sonify_status sonify_kind_parse(const char* name, sonify_kind* out);
SONIFY_API const char* sonify_kind_name(sonify_kind kind);

// ---- configuration -------------------------------------------------------

typedef struct sonify_config sonify_config;

// Defaults, then the key=value file at `path` (may be NULL), then SONIFY_*
// environment overrides when `use_env` is nonzero.
SONIFY_API sonify_status sonify_config_load(const char* path, int use_env,
                                            sonify_config** out);
// Applies one setting and revalidates; the config is unchanged on error.
SONIFY_API sonify_status sonify_config_set(sonify_config* config, const char* key,
                                           const char* value);
// "key=value" lines of the full snapshot.
SONIFY_API sonify_status sonify_config_dump(const sonify_config* config, char** out);
SONIFY_API void sonify_config_free(sonify_config* config);

// ---- mapping -------------------------------------------------------------

SONIFY_API sonify_status sonify_map_depth(const sonify_config* config, sonify_kind kind,
                                          double depth_m, double* param);
SONIFY_API sonify_status sonify_unmap_param(const sonify_config* config, sonify_kind kind,
                                            double param, double* depth_m);

// ---- offline rendering ---------------------------------------------------

typedef struct sonify_render_info {
  uint64_t frames;
  int32_t sample_rate;
  float peak;
  uint64_t clipped_samples;
  uint64_t onsets;
} sonify_render_info;

// Renders a "t_s depth_m [azimuth_deg]" trajectory file to a 16-bit stereo
// WAV. duration_s <= 0 uses the last trajectory time. `info` may be NULL.
SONIFY_API sonify_status sonify_render_trajectory(const sonify_config* config,
                                                  sonify_kind kind,
                                                  const char* trajectory_path,
                                                  double duration_s, const char* wav_path,
                                                  sonify_render_info* info);

// Impulse response of the reverb calibrated to rt60_s. Writes the response
// as WAV (if wav_path is not NULL) and its decay curve as "time_s,level_db"
// CSV (if csv_path is not NULL). `measured_rt60_s` may be NULL.
SONIFY_API sonify_status sonify_reverb_ir(double rt60_s, int32_t sample_rate,
                                          const char* wav_path, const char* csv_path,
                                          double* measured_rt60_s);

// ---- session logs --------------------------------------------------------

typedef struct sonify_log sonify_log;

SONIFY_API sonify_status sonify_log_read(const char* path, sonify_log** out);
SONIFY_API sonify_status sonify_log_write(const sonify_log* log, const char* path);
SONIFY_API sonify_status sonify_log_serialize(const sonify_log* log, char** out);
// Learning and positioning record counts for one stage and sonification.
SONIFY_API sonify_status sonify_log_counts(const sonify_log* log, int32_t stage,
                                           sonify_kind kind, int32_t* learning,
                                           int32_t* positioning);
// Mean absolute depth error (cm) over non-aborted positioning trials of
// `stage` (0 = all stages).
SONIFY_API sonify_status sonify_log_mean_depth_error(const sonify_log* log, int32_t stage,
                                                     double* mean_cm, int32_t* trials);
// Number of self-consistency problems; details go to `report` if not NULL.
SONIFY_API sonify_status sonify_log_verify(const sonify_log* log, int32_t* issues,
                                           char** report);
SONIFY_API void sonify_log_free(sonify_log* log);

// ---- simulated sessions --------------------------------------------------

typedef struct sonify_simulation {
  const char* participant_id;  // NULL: "sim-001"
  uint64_t seed;
  const int32_t* stages;       // NULL or count 0: stages 1, 2, 3
  size_t stage_count;
  const sonify_kind* kinds;    // NULL or count 0: all, in the seeded order
  size_t kind_count;
  const char* model;           // "perfect", "uniform", "gaussian[:SIGMA_CM]"; NULL: gaussian
  double learning_seconds;     // <= 0: 20
} sonify_simulation;

// Runs the session headless. The log is written to `log_path` (replacing
// any file there) when not NULL, and returned through `out` when not NULL.
SONIFY_API sonify_status sonify_simulate(const sonify_config* config,
                                         const sonify_simulation* options,
                                         const char* log_path, sonify_log** out);

// ---- staircase JND -------------------------------------------------------

typedef enum sonify_answer {
  SONIFY_ANSWER_DIFFERENT = 0,
  SONIFY_ANSWER_SAME = 1,
  SONIFY_ANSWER_ABORT = 2
} sonify_answer;

// Called once per trial with a WAV holding both tones (1 s each, 0.5 s gap).
typedef sonify_answer (*sonify_answer_fn)(void* user, int32_t trial_index,
                                          const char* pair_wav_path);

typedef struct sonify_jnd_result {
  double jnd_m;
  int32_t trials;
  const char* termination;  // "max_trials" or "alternation_rule"; static storage
} sonify_jnd_result;

// `listener` is "human" (requires `ask`, pair WAVs go to `pair_dir`) or
// "sim:THRESH_M" (optionally "sim:THRESH_M:LAPSE"). Trials and the
// estimate are appended to `log_path` when not NULL.
SONIFY_API sonify_status sonify_jnd(const sonify_config* config, sonify_kind kind,
                                    double base_depth_m, uint64_t seed,
                                    const char* listener, sonify_answer_fn ask,
                                    void* user, const char* pair_dir,
                                    const char* participant_id, const char* log_path,
                                    sonify_jnd_result* out);

// ---- analysis ------------------------------------------------------------

// Reads a log file or every *.jsonl in a directory, writes the report
// tables into `out_dir` and returns the summary text through `summary`
// (may be NULL). stage 0 analyzes all stages.
SONIFY_API sonify_status sonify_analyze(const char* logs_path, int32_t stage,
                                        const char* out_dir, char** summary);

// ---- live service --------------------------------------------------------

typedef struct sonify_server sonify_server;

SONIFY_API sonify_status sonify_server_create(const sonify_config* config,
                                              const char* participant_id, uint64_t seed,
                                              sonify_server** out);
// Lets sonify_server_wait return on SIGINT or SIGTERM. Call before start.
SONIFY_API sonify_status sonify_server_handle_signals(sonify_server* server);
SONIFY_API sonify_status sonify_server_start(sonify_server* server);
SONIFY_API int32_t sonify_server_port(const sonify_server* server);
SONIFY_API sonify_status sonify_server_wait(sonify_server* server);
SONIFY_API sonify_status sonify_server_stop(sonify_server* server);
SONIFY_API void sonify_server_free(sonify_server* server);

#ifdef __cplusplus
}  // extern "C"
#endif

#endif  // SONIFY_SONIFY_H_
