/* C API for the spectral kernel learning library.
 *
 * All functions return askl_status; results come back through out
 * parameters. On any failure the thread-local message from
 * askl_last_error() describes what went wrong. Handles are opaque and
 * freed with their matching *_free function; strings returned through
 * char** out parameters are freed with askl_string_free.
 */
#ifndef ASKL_H
#define ASKL_H

#include <stdint.h>

#if defined(_WIN32)
#define ASKL_API __declspec(dllexport)
#else
#define ASKL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum askl_status {
    ASKL_OK = 0,
    ASKL_ERR_ARGUMENT = 1, /* invalid argument or configuration */
    ASKL_ERR_PARSE = 2,    /* malformed input text */
    ASKL_ERR_IO = 3,       /* filesystem failure */
    ASKL_ERR_NUMERIC = 4,  /* numerical failure, including divergence */
    ASKL_ERR_INTERNAL = 5  /* unexpected internal failure */
} askl_status;

typedef enum askl_task {
    ASKL_TASK_CLASSIFICATION = 0,
    ASKL_TASK_REGRESSION = 1
} askl_task;

typedef struct askl_dataset askl_dataset;
typedef struct askl_config askl_config;
typedef struct askl_model askl_model;
typedef struct askl_trace askl_trace;

ASKL_API const char* askl_version(void);

/* Message for the most recent failure on this thread; never NULL. */
ASKL_API const char* askl_last_error(void);

ASKL_API void askl_string_free(char* s);

/* ---- datasets ---- */

ASKL_API askl_status askl_dataset_load(const char* path, askl_task task,
                                       askl_dataset** out);

/* Looks the name up in a registry JSON file and loads the mapped path with
 * the mapped task. */
ASKL_API askl_status askl_dataset_load_registry(const char* registry_path,
                                                const char* name, askl_dataset** out);

ASKL_API askl_status askl_dataset_info(const askl_dataset* ds, uint64_t* n, uint64_t* d,
                                       uint64_t* outputs, askl_task* task);

ASKL_API askl_status askl_dataset_split(const askl_dataset* ds, double test_fraction,
                                        uint64_t seed, askl_dataset** train,
                                        askl_dataset** test);

/* Fits feature/target statistics on train only and transforms both sets. */
ASKL_API askl_status askl_dataset_standardize(const askl_dataset* train,
                                              const askl_dataset* apply_to,
                                              int zscore_features,
                                              askl_dataset** train_out,
                                              askl_dataset** apply_out);

/* Transforms a dataset with the standardization stored in a model; a copy
 * is returned unchanged when the model stores none. */
ASKL_API askl_status askl_dataset_apply_model_standardization(const askl_model* model,
                                                              const askl_dataset* ds,
                                                              askl_dataset** out);

ASKL_API void askl_dataset_free(askl_dataset* ds);

/* ---- configuration ---- */

ASKL_API askl_status askl_config_from_json(const char* json_text, askl_config** out);
ASKL_API askl_status askl_config_to_json(const askl_config* config, char** json_out);
ASKL_API void askl_config_free(askl_config* config);

/* ---- training and evaluation ---- */

/* Trains on train (already standardized if desired). eval_set may be NULL;
 * when present, checkpoint records carry its metric. */
ASKL_API askl_status askl_fit(const askl_dataset* train, const askl_config* config,
                              const askl_dataset* eval_set, askl_model** out_model,
                              askl_trace** out_trace);

/* Accuracy fraction (classification) or RMSE (regression). */
ASKL_API askl_status askl_evaluate(const askl_model* model, const askl_dataset* ds,
                                   double* metric);

/* Raw estimator outputs f(x) = W^T phi(x); out_f must hold `outputs`
 * doubles. */
ASKL_API askl_status askl_predict(const askl_model* model, const double* x, uint64_t d,
                                  double* out_f, uint64_t outputs);

ASKL_API askl_status askl_model_save(const askl_model* model, const char* path);
ASKL_API askl_status askl_model_load(const char* path, askl_model** out);
ASKL_API askl_status askl_model_info(const askl_model* model, uint64_t* d,
                                     uint64_t* feature_count, uint64_t* outputs,
                                     askl_task* task, char** variant_name);
ASKL_API void askl_model_free(askl_model* model);

/* ---- training traces ---- */

ASKL_API askl_status askl_trace_record_count(const askl_trace* trace, uint64_t* count);

/* test_metric is NaN for runs without an eval set. */
ASKL_API askl_status askl_trace_record(const askl_trace* trace, uint64_t index,
                                       int64_t* iteration, double* objective,
                                       double* test_metric, double* nuclear_norm_w,
                                       double* feature_frobenius_sq);

ASKL_API askl_status askl_trace_to_csv(const askl_trace* trace, char** csv_out);
ASKL_API askl_status askl_trace_save(const askl_trace* trace, const char* path);
ASKL_API askl_status askl_trace_load(const char* path, askl_trace** out);
ASKL_API void askl_trace_free(askl_trace* trace);

/* ---- bounds ---- */

/* JSON report with the nuclear norm B, the Rademacher estimate, and the
 * excess-risk value at the supplied Lipschitz constant and confidence. */
ASKL_API askl_status askl_bound_report(const askl_model* model, const askl_dataset* ds,
                                       double lipschitz, double delta, char** json_out);

/* As askl_bound_report, choosing the Lipschitz constant automatically: 2 for
 * classification (multiclass hinge), 2 * max ||f(x) - y|| over ds for
 * regression (squared loss). */
ASKL_API askl_status askl_bound_report_auto(const askl_model* model,
                                            const askl_dataset* ds, double delta,
                                            char** json_out);

/* ---- grid search ---- */

/* grid_json: {"lambda1": [...], "lambda2": [...], "sigma": [...],
 *             "folds": 5}. Returns {"best": <config>, "table": [...]} plus
 * a CSV rendering of the table. Either out may be NULL. */
ASKL_API askl_status askl_grid_search(const askl_dataset* ds, const askl_config* base,
                                      const char* grid_json, char** result_json,
                                      char** table_csv);

#ifdef __cplusplus
}
#endif

#endif /* ASKL_H */
