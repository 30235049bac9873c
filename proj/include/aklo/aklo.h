/* Copyright 2026 The AKLO Authors
 * Licensed under the Apache License, Version 2.0
 */

#ifndef AKLO_AKLO_H
#define AKLO_AKLO_H

#include <stddef.h>
#include <stdint.h>

#if defined(AKLO_BUILDING_LIBRARY)
#define AKLO_API __attribute__((visibility("default")))
#else
#define AKLO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aklo_status {
  AKLO_OK = 0,
  AKLO_ERR_INVALID_ARGUMENT = 1,
  AKLO_ERR_DIMENSION = 2,
  AKLO_ERR_IO = 3,
  AKLO_ERR_FORMAT = 4,
  AKLO_ERR_VERSION = 5,
  AKLO_ERR_EMPTY = 6,
  AKLO_ERR_NOT_APPLICABLE = 7,
  AKLO_ERR_INTERNAL = 99
} aklo_status;

AKLO_API const char* aklo_version(void);
AKLO_API const char* aklo_status_name(aklo_status status);

/* Message of the last failing call on this thread, "" if none. */
AKLO_API const char* aklo_last_error(void);

/* ---- datasets ---- */

typedef struct aklo_dataset aklo_dataset;

typedef enum aklo_syn_kind { AKLO_SYN1 = 1, AKLO_SYN2 = 2 } aklo_syn_kind;

AKLO_API aklo_status aklo_dataset_generate(aklo_syn_kind kind, uint64_t seed, aklo_dataset** out);
AKLO_API aklo_status aklo_dataset_load_manifest(const char* path, aklo_dataset** out);
/* task_NNN.txt files and manifest.txt under dir */
AKLO_API aklo_status aklo_dataset_write(const aklo_dataset* ds, const char* dir);
AKLO_API size_t aklo_dataset_num_tasks(const aklo_dataset* ds);
AKLO_API size_t aklo_dataset_dim(const aklo_dataset* ds);
AKLO_API size_t aklo_dataset_task_size(const aklo_dataset* ds, size_t task);
AKLO_API int aklo_dataset_is_synthetic(const aklo_dataset* ds);
AKLO_API void aklo_dataset_free(aklo_dataset* ds);

/* ---- experiment configuration ----
 *
 * Keys (values are strings):
 *   policies             comma list of itol,tol,unif-sample,unif-sum,aklo-sample,aklo-sum, or "all"
 *   repetitions          positive integer
 *   seed                 unsigned integer
 *   lambda_mode          grid | theory
 *   grid                 comma list of positive values
 *   lambda               single value, same as a one-element grid
 *   alpha                linear | linear:N | constant:v | custom:a,b,... | doubling
 *   eps                  fixed | double-trick
 *   R, X                 positive value or "auto"
 *   validation_fraction  value in (0, 1]
 *   jobs                 worker threads, 0 for hardware concurrency
 *   timing               on | off (off writes 0 seconds)
 *   traces               on | off
 *   bounds_on_real_data  on | off
 *   gamma, delta         values in (0, 1)
 */

typedef struct aklo_config aklo_config;

AKLO_API aklo_status aklo_config_create(aklo_config** out);
AKLO_API aklo_status aklo_config_set(aklo_config* cfg, const char* key, const char* value);
/* key = value lines, '#' comments */
AKLO_API aklo_status aklo_config_load(aklo_config* cfg, const char* path);
AKLO_API void aklo_config_free(aklo_config* cfg);

/* ---- experiments ---- */

typedef struct aklo_report aklo_report;

AKLO_API aklo_status aklo_run_experiment(const aklo_config* cfg, const aklo_dataset* ds, aklo_report** out);
AKLO_API aklo_status aklo_report_write(const aklo_report* rep, const char* dir);
AKLO_API size_t aklo_report_num_policies(const aklo_report* rep);
AKLO_API const char* aklo_report_policy(const aklo_report* rep, size_t i);
AKLO_API double aklo_report_mean_ace(const aklo_report* rep, size_t i);
AKLO_API double aklo_report_sd_ace(const aklo_report* rep, size_t i);
AKLO_API double aklo_report_mean_seconds(const aklo_report* rep, size_t i);
/* lambda used for grid mode, NaN in theory mode */
AKLO_API double aklo_report_lambda(const aklo_report* rep);
AKLO_API double aklo_report_R(const aklo_report* rep);
AKLO_API double aklo_report_X(const aklo_report* rep);
AKLO_API void aklo_report_free(aklo_report* rep);

/* ---- bounds ---- */

typedef struct aklo_bounds aklo_bounds;

typedef enum aklo_bound_kind { AKLO_BOUND_T1 = 1, AKLO_BOUND_T2 = 2, AKLO_BOUND_C2 = 3 } aklo_bound_kind;

/* Fails with AKLO_ERR_NOT_APPLICABLE on loaded data unless bounds_on_real_data is on. */
AKLO_API aklo_status aklo_run_bounds(const aklo_config* cfg, const aklo_dataset* ds, aklo_bounds** out);
AKLO_API aklo_status aklo_bounds_write(const aklo_bounds* b, const char* dir);
AKLO_API size_t aklo_bounds_num_rows(const aklo_bounds* b);
AKLO_API size_t aklo_bounds_num_applicable(const aklo_bounds* b);
AKLO_API size_t aklo_bounds_violations(const aklo_bounds* b, aklo_bound_kind kind);
AKLO_API void aklo_bounds_free(aklo_bounds* b);

/* ---- knowledge base ---- */

typedef struct aklo_kb aklo_kb;

AKLO_API aklo_status aklo_kb_create(aklo_kb** out);
AKLO_API aklo_status aklo_kb_load(const char* path, aklo_kb** out);
AKLO_API aklo_status aklo_kb_save(const aklo_kb* kb, const char* path);
AKLO_API size_t aklo_kb_size(const aklo_kb* kb);
AKLO_API aklo_status aklo_kb_model(const aklo_kb* kb, size_t i, int64_t* task_id, size_t* dim);
/* copies min(n, dim) weights of model i */
AKLO_API aklo_status aklo_kb_weights(const aklo_kb* kb, size_t i, double* out, size_t n);
AKLO_API void aklo_kb_free(aklo_kb* kb);

/* ---- interactive task session ----
 *
 * One task against a knowledge base: predict, then observe the true label,
 * repeated; finish appends the learned model to the knowledge base. The
 * session reads lambda, alpha and eps from cfg; lambda must then be a single
 * value. NULL cfg means lambda 1 with the default alpha and eps. horizon 0
 * means unknown.
 */

typedef struct aklo_session aklo_session;

AKLO_API aklo_status aklo_session_create(const aklo_kb* kb, const char* policy, const aklo_config* cfg,
                                         size_t dim, size_t horizon, uint64_t seed, aklo_session** out);
AKLO_API aklo_status aklo_session_predict(aklo_session* s, const uint64_t* indices, const double* values,
                                          size_t nnz, double* score, int* label);
AKLO_API aklo_status aklo_session_observe(aklo_session* s, int label);
AKLO_API size_t aklo_session_mistakes(const aklo_session* s);
AKLO_API size_t aklo_session_steps(const aklo_session* s);
/* The kb must be the one the session was created with. */
AKLO_API aklo_status aklo_session_finish(aklo_session* s, aklo_kb* kb);
AKLO_API void aklo_session_free(aklo_session* s);

/* ---- format conversion ---- */

/* format: libsvm | csv. label_map like "0:-1,1:+1", NULL for the default. */
AKLO_API aklo_status aklo_convert(const char* in_path, const char* out_path, const char* format,
                                  const char* label_map, int one_based);

#ifdef __cplusplus
}
#endif

#endif
