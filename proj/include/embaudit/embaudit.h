// Copyright 2026 The embaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the embaudit membership-privacy audit library.
 *
 * Objects are opaque handles created by ea_*_create / _read / _fit / _load
 * and released by the matching _free. Every fallible call returns an
 * ea_status; on failure ea_last_error() describes it (thread-local, valid
 * until the next failing call on the same thread). Labels use
 * 0 = non_member, 1 = member, 255 = unknown. */

#ifndef EMBAUDIT_EMBAUDIT_H_
#define EMBAUDIT_EMBAUDIT_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EMBAUDIT_BUILDING_LIBRARY)
#define EA_API __attribute__((visibility("default")))
#else
#define EA_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ea_status {
  EA_OK = 0,
  EA_ERR_FORMAT = 1,
  EA_ERR_VALIDATION = 2,
  EA_ERR_DOMAIN = 3,
  EA_ERR_INSUFFICIENT_DATA = 4,
  EA_ERR_DEGENERATE_FIT = 5,
  EA_ERR_TRAINING = 6,
  EA_ERR_DIVERGENCE = 7,
  EA_ERR_METRIC = 8,
  EA_ERR_CONFIG = 9,
  EA_ERR_IO = 10,
  EA_ERR_INTERNAL = 11,
  EA_ERR_INVALID_ARGUMENT = 12 /* null handle or pointer */
} ea_status;

enum {
  EA_LABEL_NON_MEMBER = 0,
  EA_LABEL_MEMBER = 1,
  EA_LABEL_UNKNOWN = 255
};

EA_API const char* ea_version(void);
EA_API const char* ea_last_error(void);
EA_API const char* ea_status_name(ea_status status);
/* Process exit code for a command status: 0 ok, 3 I/O, 4 internal, else 2. */
EA_API int ea_exit_code_for(ea_status status);

/* ---- Embedding sets ---------------------------------------------------- */

typedef struct ea_set ea_set;

EA_API ea_status ea_set_create(uint32_t dimension, ea_set** out);
EA_API ea_status ea_set_append(ea_set* set, uint64_t group_id, uint8_t label,
                               const float* values, size_t count);
/* Format follows the extension: ".csv" is CSV, anything else EMB1. */
EA_API ea_status ea_set_read(const char* path, ea_set** out);
EA_API ea_status ea_set_write(const ea_set* set, const char* path);
EA_API void ea_set_free(ea_set* set);
EA_API uint32_t ea_set_dimension(const ea_set* set);
EA_API size_t ea_set_size(const ea_set* set);
/* *values stays valid until the set is modified or freed. */
EA_API ea_status ea_set_record(const ea_set* set, size_t index,
                               uint64_t* group_id, uint8_t* label,
                               const float** values);

/* ---- Signals and the likelihood attack -------------------------------- */

EA_API ea_status ea_p_norm(const float* values, size_t count, double p,
                           double* out);

typedef struct ea_norm_model ea_norm_model;

EA_API ea_status ea_norm_model_fit(const double* member_norms,
                                   size_t member_count,
                                   const double* nonmember_norms,
                                   size_t nonmember_count, double p,
                                   double prior_member, ea_norm_model** out);
EA_API ea_status ea_norm_model_params(const ea_norm_model* model,
                                      double* member_mean,
                                      double* member_stddev,
                                      double* nonmember_mean,
                                      double* nonmember_stddev);
EA_API ea_status ea_norm_model_posterior(const ea_norm_model* model,
                                         double norm_value, double* posterior,
                                         uint8_t* verdict);
EA_API void ea_norm_model_free(ea_norm_model* model);

/* ---- Metrics ----------------------------------------------------------- */

typedef struct ea_metrics {
  double accuracy;
  double precision;
  double recall;
  uint64_t tp;
  uint64_t fp;
  uint64_t tn;
  uint64_t fn;
} ea_metrics;

/* tpr_out receives one value per requested FPR level (may be null when
 * level_count is 0). */
EA_API ea_status ea_compute_metrics(const double* scores,
                                    const uint8_t* verdicts,
                                    const uint8_t* truths, size_t count,
                                    const double* fpr_levels,
                                    size_t level_count, ea_metrics* out,
                                    double* tpr_out);

EA_API double ea_bayes_optimal_accuracy(double member_mean,
                                        double member_stddev,
                                        double nonmember_mean,
                                        double nonmember_stddev,
                                        double prior_member);

EA_API ea_status ea_knn_utility(const ea_set* train,
                                const uint32_t* train_classes,
                                const ea_set* test,
                                const uint32_t* test_classes, size_t k,
                                double* accuracy);

/* ---- Trained attack classifiers --------------------------------------- */

typedef struct ea_classifier ea_classifier;

EA_API ea_status ea_classifier_load(const char* path, ea_classifier** out);
EA_API size_t ea_classifier_input_dimension(const ea_classifier* classifier);
EA_API ea_status ea_classifier_predict(const ea_classifier* classifier,
                                       const double* features, size_t count,
                                       double* member_probability);
EA_API void ea_classifier_free(ea_classifier* classifier);

/* ---- Commands ---------------------------------------------------------- */

typedef struct ea_run_options {
  const char* config_path; /* required */
  const char* out_dir;     /* overrides output_dir when non-null */
  int has_seed;            /* nonzero: seed overrides the config seed */
  uint64_t seed;
  const char* format; /* "json" or "csv" report format; null keeps config */
} ea_run_options;

EA_API ea_status ea_cmd_audit(const ea_run_options* options);
/* Writes sweep_p.csv; *csv_out (optional) receives a copy to release with
 * ea_string_free. */
EA_API ea_status ea_cmd_sweep_p(const ea_run_options* options, char** csv_out);
EA_API ea_status ea_cmd_split(const ea_run_options* options);
EA_API ea_status ea_cmd_synth(const ea_run_options* options,
                              double* bayes_accuracy);
EA_API ea_status ea_cmd_histogram(const char* const* dump_paths,
                                  size_t dump_count, double p, size_t bins,
                                  const char* out_path);
EA_API void ea_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* EMBAUDIT_EMBAUDIT_H_ */
