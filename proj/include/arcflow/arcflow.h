#ifndef ARCFLOW_ARCFLOW_H
#define ARCFLOW_ARCFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ARCFLOW_BUILDING)
#define ARCFLOW_API __declspec(dllexport)
#else
#define ARCFLOW_API __declspec(dllimport)
#endif
#else
#define ARCFLOW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum arcflow_status {
  ARCFLOW_OK = 0,
  ARCFLOW_E_ARGUMENT = 1,
  ARCFLOW_E_STRUCTURAL = 2,
  ARCFLOW_E_RANGE = 3,
  ARCFLOW_E_HORIZON = 4,
  ARCFLOW_E_TOLERANCE = 5,
  ARCFLOW_E_CONFIG = 6,
  ARCFLOW_E_IO = 7,
  ARCFLOW_E_INTERNAL = 8
} arcflow_status;

typedef struct arcflow_space arcflow_space;
typedef struct arcflow_field arcflow_field;
typedef struct arcflow_report arcflow_report;

typedef struct arcflow_solve_options {
  double tol;
  int n_min;
  int n_max;
  /* Negative: stop after the first local piece. */
  double total_time;
  double radius;
  double time_window;
  double safety;
  uint64_t seed;
} arcflow_solve_options;

/* Message of the last failing call on this thread; never NULL. */
ARCFLOW_API const char* arcflow_last_error(void);
ARCFLOW_API const char* arcflow_version(void);

/* Space from JSON such as {"kind":"euclidean","dim":2}. */
ARCFLOW_API arcflow_status arcflow_space_create(const char* json,
                                                arcflow_space** out);
ARCFLOW_API void arcflow_space_free(arcflow_space* space);
ARCFLOW_API size_t arcflow_space_point_size(const arcflow_space* space);
ARCFLOW_API arcflow_status arcflow_space_distance(const arcflow_space* space,
                                                  const double* x,
                                                  const double* y,
                                                  double* out);

/* Field from JSON such as {"kind":"linear","matrix":[1]}. */
ARCFLOW_API arcflow_status arcflow_field_create(const arcflow_space* space,
                                                const char* json,
                                                arcflow_field** out);
ARCFLOW_API void arcflow_field_free(arcflow_field* field);
ARCFLOW_API arcflow_status arcflow_field_eval(const arcflow_field* field,
                                              double t, const double* x,
                                              double h, double* out);
ARCFLOW_API arcflow_status arcflow_field_double_speed(
    const arcflow_field* field, arcflow_field** out);

ARCFLOW_API void arcflow_solve_options_default(arcflow_solve_options* options);

/* On ARCFLOW_E_TOLERANCE *out holds the partial report and must be freed. */
ARCFLOW_API arcflow_status arcflow_solve(const arcflow_space* space,
                                         const arcflow_field* field,
                                         const double* a, double t,
                                         const arcflow_solve_options* options,
                                         arcflow_report** out);
ARCFLOW_API arcflow_status arcflow_sum_solve(
    const arcflow_space* space, const arcflow_field* phi,
    const arcflow_field* psi, const double* a, double t,
    const arcflow_solve_options* options, arcflow_report** out);
ARCFLOW_API void arcflow_report_free(arcflow_report* report);

ARCFLOW_API size_t arcflow_report_node_count(const arcflow_report* report);
ARCFLOW_API arcflow_status arcflow_report_node(const arcflow_report* report,
                                               size_t index, double* time,
                                               double* point);
ARCFLOW_API int arcflow_report_levels(const arcflow_report* report);
ARCFLOW_API double arcflow_report_cauchy_gap(const arcflow_report* report);
ARCFLOW_API arcflow_status arcflow_report_eval(const arcflow_report* report,
                                               double s, double* out);
/* Strings returned here are released with arcflow_string_free. */
ARCFLOW_API arcflow_status arcflow_report_json(const arcflow_report* report,
                                               char** out);
ARCFLOW_API arcflow_status arcflow_report_csv(const arcflow_report* report,
                                              char** out);
ARCFLOW_API void arcflow_string_free(char* s);

/* Runs a study command; has_* flags select the overrides. exit_code receives
   0 ok, 2 config, 3 tolerance, 4 failed check. */
ARCFLOW_API arcflow_status arcflow_run_study(
    const char* command, const char* config_json, const char* out_dir,
    int has_seed, uint64_t seed, int has_tol, double tol, int has_n_max,
    int n_max, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
