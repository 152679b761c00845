#ifndef MSTC_H
#define MSTC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum MstcStatus {
  /**
   * The call succeeded.
   */
  MstcOk = 0,
  /**
   * A pointer argument was null or a string was not valid UTF-8.
   */
  MstcInvalidArgument = 1,
  /**
   * The input failed parsing or validation; see the last error message.
   */
  MstcInvalidInput = 2,
} MstcStatus;

/**
 * Opaque handle to a test curve, bound to the space it was parsed against.
 */
typedef struct MstcCurve MstcCurve;

/**
 * Opaque handle to a finite metric measure space.
 */
typedef struct MstcSpace MstcSpace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns a pointer to a NUL-terminated description of the last failure on
 * this thread, or null when every call so far succeeded. The pointer stays
 * valid until the next failing call on the same thread.
 *
 * # Safety
 * The returned pointer must not be freed or used after a later failure.
 */
const char *mstc_last_error_message(void);

/**
 * Parses a space from JSON (`{"n":…, "dist":[[…]], "weight":[…],
 * "coords":[[…]]?}`) and validates the metric axioms.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be a valid pointer. On success
 * `*out` owns the space and must be released with [`mstc_space_free`].
 */
enum MstcStatus mstc_space_from_json(const char *json, struct MstcSpace **out);

/**
 * Releases a space handle. Null is a no-op.
 *
 * # Safety
 * `space` must have come from [`mstc_space_from_json`] and not been freed.
 */
void mstc_space_free(struct MstcSpace *space);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `space` must be a live handle or null.
 */
uintptr_t mstc_space_points(const struct MstcSpace *space);

/**
 * Parses a curve from JSON (`{"domain":[a,b], "pieces":[…]}`) against a
 * space.
 *
 * # Safety
 * As [`mstc_space_from_json`]; on success `*out` must be released with
 * [`mstc_curve_free`].
 */
enum MstcStatus mstc_curve_from_json(const struct MstcSpace *space,
                                     const char *json,
                                     struct MstcCurve **out);

/**
 * Releases a curve handle. Null is a no-op.
 *
 * # Safety
 * `curve` must have come from [`mstc_curve_from_json`] and not been freed.
 */
void mstc_curve_free(struct MstcCurve *curve);

/**
 * Total variation of the curve in the space.
 *
 * # Safety
 * Handles must be live; `out` must be a valid pointer.
 */
enum MstcStatus mstc_curve_variation(const struct MstcSpace *space,
                                     const struct MstcCurve *curve,
                                     double *out);

/**
 * Symmetrized curve integral `∫^S_γ f` of the table `values` (one entry per
 * space point) along the curve.
 *
 * # Safety
 * Handles must be live; `values` must point at `len` doubles; `out` must be
 * a valid pointer.
 */
enum MstcStatus mstc_sym_integrate(const struct MstcSpace *space,
                                   const struct MstcCurve *curve,
                                   const double *values,
                                   uintptr_t len,
                                   double *out);

/**
 * Discrete p-modulus of a family given as JSON: a curve array or
 * `{"enumerate": {"max_jumps": J, "depth": D}}` (depth defaults to 3).
 *
 * # Safety
 * As [`mstc_sym_integrate`].
 */
enum MstcStatus mstc_modulus(const struct MstcSpace *space,
                             const char *family_json,
                             double p,
                             double *out);

/**
 * Pointwise-minimal Hajłasz gradient of the table `values`. Writes the
 * gradient into `gradient_out` (space size entries) and its L^p norm into
 * `norm_out`.
 *
 * # Safety
 * `values` and `gradient_out` must point at `len` doubles with `len` equal
 * to the space size; `norm_out` must be a valid pointer.
 */
enum MstcStatus mstc_hajlasz_min(const struct MstcSpace *space,
                                 const double *values,
                                 uintptr_t len,
                                 double p,
                                 double *gradient_out,
                                 double *norm_out);

/**
 * Runs a verification suite (`"uno"`, `"bounded18"`, `"seventysix"`,
 * `"plans"`, `"fuglede"` or `"all"`) and returns the JSON report. A report
 * is produced even when the suite finds violations; inspect its `passed`
 * field.
 *
 * # Safety
 * `suite` must be NUL-terminated; `report_out` must be a valid pointer. On
 * success `*report_out` must be released with [`mstc_string_free`].
 */
enum MstcStatus mstc_verify_suite(const char *suite,
                                  uintptr_t spaces,
                                  uint64_t seed,
                                  uintptr_t max_jumps,
                                  uint32_t depth,
                                  double p,
                                  double tolerance,
                                  char **report_out);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must have come from this library and not been freed.
 */
void mstc_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MSTC_H */
