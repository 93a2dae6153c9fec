/* graspmc C interface.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a gmc_status; on failure a message is available
 * from gmc_last_error() on the calling thread until the next failing call.
 * Strings returned through char** are owned by the caller and released with
 * gmc_string_free(). Structured data crosses the boundary as JSON documents
 * carrying a "schema" tag.
 */
#ifndef GRASPMC_H
#define GRASPMC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(GRASPMC_BUILDING)
#define GMC_API __declspec(dllexport)
#else
#define GMC_API __declspec(dllimport)
#endif
#else
#define GMC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gmc_status {
  GMC_OK = 0,
  GMC_INVALID_ARGUMENT = 1,
  GMC_NON_SYMMETRIC_COVARIANCE = 2,
  GMC_DECOMPOSITION_FAILURE = 3,
  GMC_ZERO_QUATERNION = 4,
  GMC_EMPTY_HISTORY = 5,
  GMC_NO_REGIONS = 6,
  GMC_ZERO_CURRENT_DENSITY = 7,
  GMC_DEMONSTRATION_FAILURE = 8,
  GMC_INVALID_DEMONSTRATION = 9,
  GMC_MISSING_SOURCE_MODEL = 10,
  GMC_UNKNOWN_OBJECT = 11,
  GMC_PARSE_ERROR = 12,
  GMC_IO_ERROR = 13,
  GMC_INTERNAL_ERROR = 100
} gmc_status;

typedef struct gmc_catalog gmc_catalog;
typedef struct gmc_model gmc_model;
typedef struct gmc_result gmc_result;

GMC_API const char* gmc_version(void);
GMC_API const char* gmc_status_name(gmc_status status);
GMC_API const char* gmc_last_error(void);
GMC_API void gmc_string_free(char* s);

/* Object catalogs. */
GMC_API gmc_status gmc_catalog_builtin(gmc_catalog** out);
GMC_API gmc_status gmc_catalog_from_json(const char* json, gmc_catalog** out);
GMC_API gmc_status gmc_catalog_to_json(const gmc_catalog* catalog, char** out);
GMC_API gmc_status gmc_catalog_size(const gmc_catalog* catalog, size_t* out);
GMC_API gmc_status gmc_catalog_name(const gmc_catalog* catalog, size_t index, char** out);
GMC_API void gmc_catalog_free(gmc_catalog* catalog);

/* Experiment configs. Input documents may omit fields; outputs list every
 * field after defaulting. */
GMC_API gmc_status gmc_config_default(char** out);
GMC_API gmc_status gmc_config_normalize(const char* json, char** out);

/* The demonstrations / rough sketch an experiment with this config uses. */
GMC_API gmc_status gmc_demonstrate(const gmc_catalog* catalog, const char* config_json, char** out);
GMC_API gmc_status gmc_sketch(const gmc_catalog* catalog, const char* config_json, char** out);

/* Runs one experiment. `source` is required for transfer presets and ignored
 * otherwise. `out_model` may be NULL; it receives NULL for the random-walk
 * baseline. */
GMC_API gmc_status gmc_run_experiment(const gmc_catalog* catalog, const char* config_json, const gmc_model* source,
                                      gmc_result** out_result, gmc_model** out_model);

GMC_API gmc_status gmc_result_to_json(const gmc_result* result, int include_trace, char** out);
GMC_API gmc_status gmc_result_from_json(const char* json, gmc_result** out);
/* success, slipped, collision, miss */
GMC_API gmc_status gmc_result_tallies(const gmc_result* result, size_t out[4]);
GMC_API void gmc_result_free(gmc_result* result);

GMC_API gmc_status gmc_model_to_json(const gmc_model* model, char** out);
GMC_API gmc_status gmc_model_from_json(const char* json, gmc_model** out);
GMC_API gmc_status gmc_model_export_samples(const gmc_model* model, int success_only, char** out);
GMC_API void gmc_model_free(gmc_model* model);

typedef enum gmc_table_format { GMC_TABLE_CSV = 0, GMC_TABLE_TEXT = 1 } gmc_table_format;

/* Tallies table over `count` results. With `medians` set, one row per
 * (experiment, object) holding per-column medians. */
GMC_API gmc_status gmc_report(const gmc_result* const* results, size_t count, gmc_table_format format, int medians,
                              char** out);

#ifdef __cplusplus
}
#endif

#endif /* GRASPMC_H */
