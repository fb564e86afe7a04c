/* C interface to the fastron library. All functions report failures through
 * a status code; fastron_last_error() describes the most recent failure on the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef FASTRON_H
#define FASTRON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FASTRON_API __declspec(dllexport)
#else
#define FASTRON_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fastron_status {
  FASTRON_OK = 0,
  FASTRON_INVALID_ARGUMENT = 1,
  FASTRON_DUPLICATE_POINT = 2,
  FASTRON_IO_ERROR = 3,
  FASTRON_CONFIG_ERROR = 4,
  FASTRON_THRESHOLD_FAILED = 5,
  FASTRON_PLANNING_ERROR = 6,
  FASTRON_INTERNAL_ERROR = 7
} fastron_status;

typedef struct fastron_model fastron_model;
typedef struct fastron_scenario fastron_scenario;

/* Message for the last non-OK status on this thread ("" if none). */
FASTRON_API const char* fastron_last_error(void);
FASTRON_API const char* fastron_status_string(fastron_status status);

typedef struct fastron_train_params {
  double gamma;
  double beta;
  size_t iter_max;
  size_t max_support;
  uint64_t seed;
} fastron_train_params;

typedef struct fastron_train_report {
  size_t iterations;
  size_t corrections;
  size_t removals;
  size_t misclassified;
  int reverted;
  int cap_terminated;
} fastron_train_report;

FASTRON_API void fastron_train_params_default(fastron_train_params* params);

/* params may be NULL for defaults. */
FASTRON_API fastron_status fastron_model_create(size_t dim, const fastron_train_params* params,
                                                fastron_model** out);
FASTRON_API void fastron_model_destroy(fastron_model* model);

/* points is row-major n x dim in [-1, 1]; labels are +1 (collision) or -1 (free). */
FASTRON_API fastron_status fastron_model_set_data(fastron_model* model, const double* points,
                                                  const int* labels, size_t n);
/* report may be NULL. */
FASTRON_API fastron_status fastron_model_train(fastron_model* model, fastron_train_report* report);
FASTRON_API fastron_status fastron_model_predict(const fastron_model* model, const double* q,
                                                 size_t dim, int* label);
FASTRON_API fastron_status fastron_model_hypothesis(const fastron_model* model, const double* q,
                                                    size_t dim, double* value);
FASTRON_API fastron_status fastron_model_sparsify(fastron_model* model, size_t* removed);
FASTRON_API size_t fastron_model_dim(const fastron_model* model);
FASTRON_API size_t fastron_model_size(const fastron_model* model);
FASTRON_API size_t fastron_model_support_count(const fastron_model* model);
FASTRON_API fastron_status fastron_model_save(const fastron_model* model, const char* path);
FASTRON_API fastron_status fastron_model_load(const char* path, fastron_model** out);

/* Runs one update cycle against the scenario's collision oracle. The first
 * cycle on an empty model labels the configured number of uniform samples.
 * oracle_calls may be NULL. */
FASTRON_API fastron_status fastron_model_update(fastron_model* model, fastron_scenario* scenario,
                                                uint64_t cycle, uint64_t* oracle_calls);

/* A robot plus obstacles built from a JSON config and a seed. */
FASTRON_API fastron_status fastron_scenario_create(const char* config_json, uint64_t seed,
                                                   fastron_scenario** out);
FASTRON_API fastron_status fastron_scenario_load(const char* config_path, uint64_t seed,
                                                 fastron_scenario** out);
FASTRON_API void fastron_scenario_destroy(fastron_scenario* scenario);
FASTRON_API size_t fastron_scenario_dof(const fastron_scenario* scenario);
FASTRON_API size_t fastron_scenario_obstacle_count(const fastron_scenario* scenario);
/* Ground-truth label of an input-space point. */
FASTRON_API fastron_status fastron_scenario_label(fastron_scenario* scenario, const double* q,
                                                  size_t dim, int* label);
/* Applies the configured obstacle motion for one step. */
FASTRON_API fastron_status fastron_scenario_advance(fastron_scenario* scenario, size_t step);

typedef enum fastron_command {
  FASTRON_CMD_STATIC = 0,
  FASTRON_CMD_SWEEP = 1,
  FASTRON_CMD_DYNAMIC = 2,
  FASTRON_CMD_PLAN = 3
} fastron_command;

typedef struct fastron_bench_options {
  fastron_command command;
  const char* config_path;
  const char* out_path;     /* CSV destination; NULL skips writing */
  size_t seeds;             /* number of seeds; 0 means 1 */
  uint64_t seed_offset;     /* seeds are config seed + offset + 0..seeds-1 */
  int check_thresholds;     /* nonzero: FASTRON_THRESHOLD_FAILED if any fails */
  const char* save_model;   /* optional model output path */
  const char* load_model;   /* optional model input path */
} fastron_bench_options;

typedef struct fastron_bench_summary {
  size_t records;
  size_t threshold_failures;
} fastron_bench_summary;

/* summary may be NULL. Threshold failure messages are joined by newlines in
 * fastron_last_error(). */
FASTRON_API fastron_status fastron_bench_run(const fastron_bench_options* options,
                                             fastron_bench_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* FASTRON_H */
