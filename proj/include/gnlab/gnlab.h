/* C interface to gnlab.
 *
 * Every function returns a status code (GNL_OK on success). On failure the
 * message is available from gnl_last_error() until the next call on the same
 * thread. Strings returned by accessors are owned by the handle they came
 * from and stay valid until that handle is freed.
 */
#ifndef GNLAB_GNLAB_H
#define GNLAB_GNLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define GNL_API __declspec(dllexport)
#else
#define GNL_API __attribute__((visibility("default")))
#endif

/* Status codes, matching the library's error names. */
enum {
  GNL_OK = 0,
  GNL_INVALID_ARGUMENT = 1,
  GNL_INVALID_INDEX = 2,
  GNL_NEGATIVE_RECIPROCAL = 3,
  GNL_DEGENERATE = 4,
  GNL_ALPHA_OUT_OF_RANGE = 5,
  GNL_NO_MATCHING_FACTOR = 6,
  GNL_SELF_POWER_GEQ_ONE = 7,
  GNL_SUPPORT_EXCEEDS_BOX = 8,
  GNL_AXIS_OUT_OF_RANGE = 9,
  GNL_GRID_TOO_COARSE = 10,
  GNL_EMPTY_REGION = 11,
  GNL_NONPOSITIVE_SCALE = 12,
  GNL_EPS_TOO_SMALL = 13,
  GNL_WINDOW_EMPTY = 14,
  GNL_NO_CROSSING = 15,
  GNL_ZERO_FUNCTION = 16,
  GNL_EXPONENT_MISMATCH = 17,
  GNL_INADMISSIBLE_PARAMS = 18,
  GNL_GRID_UNCONVERGED = 19,
  GNL_CONFIG_INVALID = 20,
  GNL_CONTRACT_FAILED = 21,
  GNL_IO_ERROR = 22,
  GNL_PARSE_ERROR = 23,
  GNL_INTERNAL = 99
};

typedef struct gnl_grid gnl_grid;
typedef struct gnl_report gnl_report;

GNL_API const char* gnl_version(void);
GNL_API const char* gnl_status_name(int status);
GNL_API const char* gnl_last_error(void);

/* Caps worker threads; 0 restores the hardware default. */
GNL_API void gnl_set_threads(unsigned count);

/* Runs one command described by a JSON config. A report is produced even when
 * the run fails; its exit code is 0 (contracts hold), 1 (a contract failed)
 * or 2 (invalid config). The return value is GNL_OK, GNL_CONTRACT_FAILED or
 * GNL_CONFIG_INVALID accordingly. */
GNL_API int gnl_run(const char* config_json, gnl_report** out);

GNL_API int gnl_report_exit_code(const gnl_report* report);
GNL_API int gnl_report_passed(const gnl_report* report);
/* Deterministic JSON (pretty printed with 2-space indent). */
GNL_API const char* gnl_report_json(const gnl_report* report);
GNL_API const char* gnl_report_csv(const gnl_report* report);
GNL_API const char* gnl_report_summary(const gnl_report* report);
GNL_API void gnl_report_free(gnl_report* report);

/* Samples a family ({"kind", "params", "center"}) on a grid
 * ({"box": {"lo", "hi"}, "shape"}). */
GNL_API int gnl_grid_sample(const char* family_json, const char* grid_json, gnl_grid** out);
/* Wraps caller samples (row-major) on a box; the data is copied. */
GNL_API int gnl_grid_create(size_t dim, const double* lo, const double* hi, const size_t* shape,
                            const double* samples, gnl_grid** out);
GNL_API int gnl_grid_load(const char* path, gnl_grid** out);
GNL_API int gnl_grid_save(const gnl_grid* grid, const char* path);
GNL_API int gnl_grid_export_csv(const gnl_grid* grid, const char* path);
GNL_API size_t gnl_grid_dim(const gnl_grid* grid);
GNL_API size_t gnl_grid_size(const gnl_grid* grid);
GNL_API const double* gnl_grid_samples(const gnl_grid* grid);
/* exponent: a rational such as "2", "3/2" or "inf". */
GNL_API int gnl_grid_lp_norm(const gnl_grid* grid, const char* exponent, double* out);
GNL_API void gnl_grid_free(gnl_grid* grid);

/* Balanced cover of a one-dimensional grid function. The report JSON holds
 * the intervals and multiplicity histogram; the summary holds a strip chart. */
GNL_API int gnl_cover_build(const gnl_grid* grid, const char* p, const char* q, const char* r,
                            gnl_report** out);

#ifdef __cplusplus
}
#endif

#endif /* GNLAB_GNLAB_H */
