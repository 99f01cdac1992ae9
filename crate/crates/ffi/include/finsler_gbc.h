#ifndef FINSLER_GBC_H
#define FINSLER_GBC_H

/* Generated by cbindgen from crates/ffi. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FgCommand {
  FG_COMMAND_CHECK_METRIC = 0,
  FG_COMMAND_VOLUME = 1,
  FG_COMMAND_STRUCTURE = 2,
  FG_COMMAND_DEGREE = 3,
  FG_COMMAND_GBC = 4,
  FG_COMMAND_COROLLARY = 5,
  FG_COMMAND_SUITE = 6,
} FgCommand;

typedef enum FgStatus {
  FG_STATUS_OK = 0,
  FG_STATUS_NULL_POINTER = 1,
  FG_STATUS_INVALID_UTF8 = 2,
  FG_STATUS_INVALID_ARGUMENT = 3,
  FG_STATUS_SCENARIO = 4,
  FG_STATUS_DEGENERATE = 5,
  FG_STATUS_NUMERICAL = 6,
  FG_STATUS_IO = 7,
  FG_STATUS_PANIC = 8,
} FgStatus;

/**
 * The outcome of one command, with its JSON rendering.
 */
typedef struct FgReport FgReport;

/**
 * A parsed, validated scenario.
 */
typedef struct FgScenario FgScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the next call.
 */
const char *fg_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fg_version(void);

/**
 * Looks up a builtin scenario by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum FgStatus fg_scenario_builtin(const char *name, struct FgScenario **out);

/**
 * Parses scenario-file text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum FgStatus fg_scenario_parse(const char *text, struct FgScenario **out);

/**
 * Overrides the radial node count and seed; `0` leaves a value unchanged.
 *
 * # Safety
 * `s` must come from `fg_scenario_builtin` or `fg_scenario_parse`.
 */
enum FgStatus fg_scenario_override(struct FgScenario *s, size_t mesh, uint64_t seed);

/**
 * # Safety
 * `s` must be null or a live scenario handle.
 */
void fg_scenario_free(struct FgScenario *s);

/**
 * Runs one command. A report is produced whether or not the checks pass.
 *
 * # Safety
 * `s` must be a live scenario handle; `out` must be writable.
 */
enum FgStatus fg_run(const struct FgScenario *s, enum FgCommand command, struct FgReport **out);

/**
 * Whether every check in the report is within tolerance.
 *
 * # Safety
 * `r` must be a live report handle.
 */
bool fg_report_passed(const struct FgReport *r);

/**
 * The report as JSON, owned by the report.
 *
 * # Safety
 * `r` must be a live report handle.
 */
const char *fg_report_json(const struct FgReport *r);

/**
 * # Safety
 * `r` must be null or a live report handle.
 */
void fg_report_free(struct FgReport *r);

/**
 * Indicatrix volume of a builtin metric at `z` (chart 0) with a product sphere rule.
 * `lambda` is ignored when NaN. `z_re`, `z_im` have `n` entries.
 *
 * # Safety
 * Pointers must be valid for the stated lengths; `vol` and `err` must be writable.
 */
enum FgStatus fg_volume(const char *metric,
                        double lambda,
                        size_t n,
                        const double *z_re,
                        const double *z_im,
                        size_t polar,
                        size_t azimuth,
                        double *vol,
                        double *err);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FINSLER_GBC_H */
