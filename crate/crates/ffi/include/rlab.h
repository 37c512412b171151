/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RLAB_H
#define RLAB_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RlabStatus {
  RLAB_STATUS_OK = 0,
  RLAB_STATUS_NULL_POINTER = 1,
  RLAB_STATUS_INVALID_UTF8 = 2,
  RLAB_STATUS_PARSE = 3,
  RLAB_STATUS_DOMAIN = 4,
  RLAB_STATUS_PRECISION_EXHAUSTED = 5,
  RLAB_STATUS_INVALID_ARGUMENT = 6,
  RLAB_STATUS_CONSTRAINT_VIOLATED = 7,
  RLAB_STATUS_IO = 8,
  RLAB_STATUS_PANIC = 9,
} RlabStatus;

/**
 * Validated Bohr set specification.
 */
typedef struct RlabBohrSpec RlabBohrSpec;

/**
 * Parsed constant expression.
 */
typedef struct RlabExpr RlabExpr;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Free with
 * `rlab_string_free`.
 */
char *rlab_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void rlab_string_free(char *s);

/**
 * Static version string.
 */
const char *rlab_version(void);

/**
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum RlabStatus rlab_expr_parse(const char *text, struct RlabExpr **out);

/**
 * # Safety
 * `e` must be NULL or a handle from `rlab_expr_parse`, not yet freed.
 */
void rlab_expr_free(struct RlabExpr *e);

/**
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum RlabStatus rlab_expr_to_string(const struct RlabExpr *e, char **out);

/**
 * Dyadic enclosure `[lo, hi]` with `bits` working precision, as exact
 * rational strings.
 *
 * # Safety
 * `e` must be a live handle; `lo` and `hi` must be writable.
 */
enum RlabStatus rlab_expr_enclose(const struct RlabExpr *e, uint32_t bits, char **lo, char **hi);

/**
 * Exact floor as a decimal string.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum RlabStatus rlab_expr_floor(const struct RlabExpr *e, uint32_t cap_bits, char **out);

/**
 * Writes -1, 0 or 1 for `a < b`, `a = b`, `a > b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum RlabStatus rlab_expr_compare(const struct RlabExpr *a,
                                  const struct RlabExpr *b,
                                  uint32_t cap_bits,
                                  int32_t *out);

/**
 * Builds `{m : ‖φ_i m‖ < δ_i}` from `k` frequency handles and `k` radius
 * strings.
 *
 * # Safety
 * `freqs` and `radii` must point to `k` valid entries; `out` must be writable.
 */
enum RlabStatus rlab_bohr_new(const struct RlabExpr *const *freqs,
                              const char *const *radii,
                              size_t k,
                              bool independent,
                              struct RlabBohrSpec **out);

/**
 * # Safety
 * `s` must be NULL or a handle from `rlab_bohr_new`, not yet freed.
 */
void rlab_bohr_free(struct RlabBohrSpec *s);

/**
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum RlabStatus rlab_bohr_member(const struct RlabBohrSpec *s, uint64_t m, bool *out);

/**
 * Size of the set in `[1, n]` and the theoretical density as a rational
 * string; `theoretical` receives NULL when no closed form applies.
 *
 * # Safety
 * `s` must be a live handle; `count` and `theoretical` must be writable.
 */
enum RlabStatus rlab_bohr_density(const struct RlabBohrSpec *s,
                                  uint64_t n,
                                  uint64_t *count,
                                  char **theoretical);

/**
 * Certifies the constraints of a JSON config and writes the constraint
 * report as JSON.
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `out` must be writable.
 */
enum RlabStatus rlab_validate_json(const char *config_json, char **out);

/**
 * Runs the pipeline named in a JSON config, writing the report JSON and
 * the process-style exit code (0 pass, 1 violated, 2 inconclusive).
 *
 * # Safety
 * `config_json` must be a NUL-terminated string; `report` and `exit_code`
 * must be writable.
 */
enum RlabStatus rlab_run_experiment_json(const char *config_json,
                                         char **report,
                                         int32_t *exit_code);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RLAB_H */
