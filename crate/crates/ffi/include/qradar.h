/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef QRADAR_H
#define QRADAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QrStatus {
  QR_STATUS_OK = 0,
  QR_STATUS_NULL_POINTER = 1,
  QR_STATUS_INVALID_ARGUMENT = 2,
  QR_STATUS_PARSE = 3,
  QR_STATUS_VALIDATION = 4,
  QR_STATUS_NUMERICAL = 5,
  QR_STATUS_IO = 6,
  QR_STATUS_PANIC = 7,
} QrStatus;

// Drift convention override for [`qr_sweep_run`].
typedef enum QrConvention {
  // Use the convention named in the scenario file.
  QR_CONVENTION_SCENARIO = 0,
  QR_CONVENTION_CORRECTED = 1,
  QR_CONVENTION_VERBATIM = 2,
} QrConvention;

// A validated scenario.
typedef struct QrScenario QrScenario;

// Rows of a finished sweep.
typedef struct QrSweepResult QrSweepResult;

// One row of a sweep; `lambda` is NaN when `has_lambda` is false.
typedef struct QrSweepRow {
  double axis;
  double lambda;
  bool has_lambda;
  bool physical;
  bool hurwitz;
} QrSweepRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string.
// The pointer stays valid until the next call into this library on the same thread.
const char *qr_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *qr_version(void);

// Loads and validates a scenario file. `strict` enforces device parameter ranges.
//
// # Safety
// `path` must be a NUL-terminated string; `out_scenario` must be writable.
enum QrStatus qr_scenario_load(const char *path, bool strict, struct QrScenario **out_scenario);

// Releases a scenario. Null is ignored.
//
// # Safety
// `scenario` must come from [`qr_scenario_load`] and not be used afterwards.
void qr_scenario_free(struct QrScenario *scenario);

// Runs the sweep the scenario describes. `jobs` = 0 uses every core.
//
// # Safety
// `scenario` must be a live handle; `out_result` must be writable.
enum QrStatus qr_sweep_run(const struct QrScenario *scenario,
                           enum QrConvention convention,
                           size_t jobs,
                           struct QrSweepResult **out_result);

// Number of rows in a result.
//
// # Safety
// `result` must be a live handle; `out_len` must be writable.
enum QrStatus qr_sweep_result_len(const struct QrSweepResult *result, size_t *out_len);

// Number of stage series (rows per axis value).
//
// # Safety
// `result` must be a live handle; `out_count` must be writable.
enum QrStatus qr_sweep_result_stage_count(const struct QrSweepResult *result, size_t *out_count);

// Copies row `index` into `out_row`.
//
// # Safety
// `result` must be a live handle; `out_row` must be writable.
enum QrStatus qr_sweep_result_row(const struct QrSweepResult *result,
                                  size_t index,
                                  struct QrSweepRow *out_row);

// Stage label of row `index` as a new string; release it with [`qr_string_free`].
//
// # Safety
// `result` must be a live handle; `out_label` must be writable.
enum QrStatus qr_sweep_result_stage_label(const struct QrSweepResult *result,
                                          size_t index,
                                          char **out_label);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void qr_string_free(char *s);

// Writes the result as CSV.
//
// # Safety
// `result` must be a live handle; `path` a NUL-terminated string.
enum QrStatus qr_sweep_result_write_csv(const struct QrSweepResult *result, const char *path);

// Writes the result as an SVG chart.
//
// # Safety
// `result` must be a live handle; `path` a NUL-terminated string.
enum QrStatus qr_sweep_result_write_svg(const struct QrSweepResult *result, const char *path);

// Releases a result. Null is ignored.
//
// # Safety
// `result` must come from [`qr_sweep_run`] and not be used afterwards.
void qr_sweep_result_free(struct QrSweepResult *result);

// Separability witness of a two-mode covariance matrix (16 values, row-major).
// Negative means entangled.
//
// # Safety
// `cm` must point to 16 doubles; `out_lambda` must be writable.
enum QrStatus qr_sph_lambda(const double *cm, double *out_lambda);

// Ascending symplectic eigenvalues of a `2·modes` square covariance matrix (row-major).
//
// # Safety
// `cm` must point to (2·modes)² doubles; `out_values` to `modes` writable doubles.
enum QrStatus qr_symplectic_eigenvalues(const double *cm, size_t modes, double *out_values);

// Bose–Einstein occupation of a mode at angular frequency `omega` (rad/s) and temperature (K).
//
// # Safety
// `out_n` must be writable.
enum QrStatus qr_thermal_occupation(double omega, double temperature, double *out_n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QRADAR_H */
