/* C interface to the SPDC joint-spectrum toolkit. All functions return a status code;
 * on failure spdc_last_error_*() describe the error for the calling thread. */
#ifndef SPDC_SPDC_H
#define SPDC_SPDC_H

#include <stddef.h>
#include <stdint.h>

#if defined(SPDC_BUILDING_LIBRARY)
#define SPDC_API __attribute__((visibility("default")))
#else
#define SPDC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spdc_status {
  SPDC_OK = 0,
  SPDC_ERR_CONFIG = 1,   /* invalid or unknown configuration value */
  SPDC_ERR_PARSE = 2,    /* malformed input file */
  SPDC_ERR_DOMAIN = 3,   /* physically invalid request, e.g. clipped support */
  SPDC_ERR_NUMERIC = 4,  /* fit/solver failure */
  SPDC_ERR_IO = 5,
  SPDC_ERR_ARGUMENT = 6, /* null handle or bad argument */
  SPDC_ERR_INTERNAL = 7
} spdc_status;

typedef struct spdc_config spdc_config;
typedef struct spdc_grid spdc_grid;
typedef struct spdc_result spdc_result;

typedef struct spdc_analysis {
  double r;
  double metric;       /* c^2/(ab) */
  double overlap;
  double entropy_bits;
  double schmidt_number;
  double fwhm_s_nm;
  double fwhm_i_nm;
  int regime;          /* 0 anticorrelated, 1 uncorrelated, 2 correlated, 3 asymmetric */
  int intensity_only;
} spdc_analysis;

SPDC_API const char* spdc_version(void);

/* Process exit code for a status: 0 ok, 2 config/parse/io, 3 numeric/domain/internal. */
SPDC_API int spdc_exit_code(spdc_status s);
SPDC_API const char* spdc_status_name(spdc_status s);

SPDC_API const char* spdc_last_error_message(void);
SPDC_API const char* spdc_last_error_field(void);
/* {"error":{"kind":...,"field":...,"message":...},"exit_code":N} */
SPDC_API const char* spdc_last_error_json(void);

/* Configuration */
SPDC_API spdc_status spdc_config_default(spdc_config** out);
SPDC_API spdc_status spdc_config_load(const char* path, spdc_config** out);
SPDC_API spdc_status spdc_config_parse(const char* json_text, spdc_config** out);
SPDC_API spdc_status spdc_config_preset(const char* name, spdc_config** out);
SPDC_API spdc_status spdc_config_set_seed(spdc_config* cfg, uint64_t seed);
SPDC_API spdc_status spdc_config_set_output_dir(spdc_config* cfg, const char* dir);
/* Fixes the tilt angle; a configured grating is dropped. */
SPDC_API spdc_status spdc_config_set_xi(spdc_config* cfg, double xi_deg);
/* Writes the hex config hash (NUL-terminated) into buf. */
SPDC_API spdc_status spdc_config_hash(const spdc_config* cfg, char* buf, size_t len);
SPDC_API void spdc_config_free(spdc_config* cfg);

/* Joint spectrum */
SPDC_API spdc_status spdc_grid_compute(const spdc_config* cfg, spdc_grid** out);
SPDC_API spdc_status spdc_grid_load(const char* path, spdc_grid** out);
SPDC_API spdc_status spdc_grid_shape(const spdc_grid* g, size_t* n_s, size_t* n_i);
/* Copies axes (nm) and row-major S; any pointer may be NULL. */
SPDC_API spdc_status spdc_grid_copy(const spdc_grid* g, double* lambda_s, double* lambda_i,
                                    double* intensity);
SPDC_API spdc_status spdc_grid_analyze(const spdc_grid* g, spdc_analysis* out);
SPDC_API void spdc_grid_free(spdc_grid* g);

/* Commands: "jsa", "analyze", "sweep", "scan", "solve-xi". `input` is used by analyze only. */
SPDC_API spdc_status spdc_run(const char* command, const spdc_config* cfg, const char* input,
                              spdc_result** out);
SPDC_API size_t spdc_result_file_count(const spdc_result* r);
SPDC_API const char* spdc_result_file(const spdc_result* r, size_t i);
SPDC_API size_t spdc_result_warning_count(const spdc_result* r);
SPDC_API const char* spdc_result_warning(const spdc_result* r, size_t i);
SPDC_API const char* spdc_result_summary(const spdc_result* r);
SPDC_API void spdc_result_free(spdc_result* r);

#ifdef __cplusplus
}
#endif

#endif
