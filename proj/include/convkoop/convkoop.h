/* SPDX-License-Identifier: Apache-2.0 */
/* C interface to libconvkoop. Handles are opaque; every call that can fail returns ck_status
   and leaves a message for ck_last_error() on the calling thread. */
#ifndef CONVKOOP_H
#define CONVKOOP_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(CONVKOOP_BUILDING)
#define CK_API __declspec(dllexport)
#else
#define CK_API __declspec(dllimport)
#endif
#else
#define CK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ck_status {
    CK_OK = 0,
    CK_ERR_CONFIG = 1,   /* bad configuration, missing file, unparsable input */
    CK_ERR_NUMERIC = 2,  /* non-finite values, degenerate spectra, failed solves */
    CK_ERR_CONTRACT = 3, /* precondition violated by the caller */
    CK_ERR_INTERNAL = 4
} ck_status;

typedef struct ck_config ck_config;
typedef struct ck_trajectory ck_trajectory;
typedef struct ck_basis ck_basis;
typedef struct ck_model ck_model;
typedef struct ck_report ck_report;

/* Receives each file a command wrote. */
typedef void (*ck_file_callback)(const char* path, void* user);

CK_API const char* ck_version(void);
CK_API const char* ck_last_error(void);
/* Warnings raised by the last call on this thread. */
CK_API size_t ck_warning_count(void);
CK_API const char* ck_warning(size_t i);

/* Configuration: same keys as the key=value config file. */
CK_API ck_status ck_config_new(ck_config** out);
CK_API void ck_config_free(ck_config* cfg);
CK_API ck_status ck_config_set(ck_config* cfg, const char* key, const char* value);
CK_API ck_status ck_config_load(ck_config* cfg, const char* path);
CK_API size_t ck_config_key_count(void);
CK_API const char* ck_config_key(size_t i);

/* Trajectories: samples are channels x length, row-major. */
CK_API ck_status ck_trajectory_from_array(size_t channels, size_t length, double dt, double t0,
                                          const double* samples, ck_trajectory** out);
CK_API ck_status ck_trajectory_read_csv(const char* path, ck_trajectory** out);
CK_API ck_status ck_trajectory_write_csv(const ck_trajectory* traj, const char* path);
CK_API ck_status ck_simulate(const ck_config* cfg, ck_trajectory** out);    /* full preset state */
CK_API ck_status ck_load_signal(const ck_config* cfg, ck_trajectory** out); /* after the measurement */
CK_API size_t ck_trajectory_channels(const ck_trajectory* traj);
CK_API size_t ck_trajectory_length(const ck_trajectory* traj);
CK_API double ck_trajectory_dt(const ck_trajectory* traj);
CK_API ck_status ck_trajectory_copy(const ck_trajectory* traj, double* samples);
CK_API void ck_trajectory_free(ck_trajectory* traj);

/* Hankel SVD basis. */
CK_API ck_status ck_basis_svd(const ck_trajectory* traj, size_t n_delays, size_t rank, ck_basis** out);
CK_API size_t ck_basis_rank(const ck_basis* basis);
CK_API size_t ck_basis_window_length(const ck_basis* basis); /* channels * delays */
CK_API ck_status ck_basis_sigma(const ck_basis* basis, double* sigma);
CK_API ck_status ck_basis_window_functions(const ck_basis* basis, double* u); /* (D*N) x r, row-major */
CK_API void ck_basis_free(ck_basis* basis);

/* Models. */
CK_API ck_status ck_model_havok(const ck_basis* basis, ck_model** out);
CK_API ck_status ck_model_build(const ck_config* cfg, const ck_trajectory* signal, ck_model** out);
CK_API size_t ck_model_rank(const ck_model* model);
CK_API ck_status ck_model_operator(const ck_model* model, double* op); /* r x r, row-major */
CK_API ck_status ck_model_eigenvalues(const ck_model* model, double* re, double* im); /* continuous time */
CK_API double ck_model_discrepancy(const ck_model* model);
CK_API size_t ck_model_report_size(const ck_model* model);
CK_API ck_status ck_model_report_entry(const ck_model* model, size_t i, const char** key, const char** value);
CK_API ck_status ck_model_forecast(const ck_model* model, const double* w0, size_t horizon, double* out);
CK_API void ck_model_free(ck_model* model);

/* Subcommands, writing into the configured output directory. */
CK_API ck_status ck_cmd_simulate(const ck_config* cfg, ck_file_callback cb, void* user);
CK_API ck_status ck_cmd_embed(const ck_config* cfg, ck_file_callback cb, void* user);
CK_API ck_status ck_cmd_model(const ck_config* cfg, ck_file_callback cb, void* user);
CK_API ck_status ck_cmd_forecast(const ck_config* cfg, ck_file_callback cb, void* user);

/* Acceptance suite. */
CK_API size_t ck_criteria_count(void);
CK_API ck_status ck_criterion_info(size_t i, const char** id, const char** key, const char** title);
CK_API ck_status ck_validate(const ck_config* cfg, ck_report** out);
CK_API size_t ck_report_size(const ck_report* report);
CK_API ck_status ck_report_row(const ck_report* report, size_t i, const char** id, const char** key, int* pass,
                               const char** measured, const char** threshold, const char** detail,
                               double* seconds);
CK_API int ck_report_all_pass(const ck_report* report);
CK_API void ck_report_free(ck_report* report);

#ifdef __cplusplus
}
#endif

#endif /* CONVKOOP_H */
