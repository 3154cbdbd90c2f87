#ifndef CNN_H
#define CNN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  CNN_STATUS_OK = 0,
  CNN_STATUS_NULL_POINTER = 1,
  CNN_STATUS_INVALID_UTF8 = 2,
  CNN_STATUS_PARSE_ERROR = 3,
  CNN_STATUS_INVALID_INPUT = 4,
  CNN_STATUS_INFEASIBLE_OPT = 5,
  /**
   * The potential decreased; the call itself succeeded.
   */
  CNN_STATUS_VERIFICATION_FAILED = 6,
  CNN_STATUS_INTERNAL = 7,
} CnnStatus;

/**
 * Opaque request instance.
 */
typedef struct CnnInstance CnnInstance;

/**
 * Opaque online trace.
 */
typedef struct CnnTrace CnnTrace;

/**
 * Opaque offline trajectory.
 */
typedef struct CnnTrajectory CnnTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *cnn_last_error_message(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must be null or come from this library and not be freed twice.
 */
void cnn_string_free(char *s);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
CnnStatus cnn_instance_parse(const char *json, CnnInstance **out);

/**
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
CnnStatus cnn_instance_to_json(const CnnInstance *inst, char **out);

/**
 * Replaces diagonal segments by staircases of step at most `epsilon`
 * (an exact number such as `1/8` or `0.125`).
 *
 * # Safety
 * `inst` must be a live handle, `epsilon` NUL-terminated, `out` writable.
 */
CnnStatus cnn_instance_rectify(const CnnInstance *inst, const char *epsilon, CnnInstance **out);

/**
 * # Safety
 * `inst` must be null or a handle not yet freed.
 */
void cnn_instance_free(CnnInstance *inst);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
CnnStatus cnn_trajectory_parse(const char *json, CnnTrajectory **out);

/**
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
CnnStatus cnn_trajectory_to_json(const CnnTrajectory *traj, char **out);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void cnn_trajectory_free(CnnTrajectory *traj);

/**
 * Builds a named instance with its offline trajectory. `kind` is one of
 * `tight1`, `tight2`, `fig2`, `random`; `cycles` applies to the tight
 * families and `seed` to `random` (which uses 16 segments in `[-4, 4]²`).
 *
 * # Safety
 * `kind` must be NUL-terminated; both outputs must be writable.
 */
CnnStatus cnn_generate(const char *kind,
                       uint32_t cycles,
                       uint64_t seed,
                       CnnInstance **out_instance,
                       CnnTrajectory **out_opt);

/**
 * Runs Bishop-Rook. Fails with `InvalidInput` on diagonal segments.
 *
 * # Safety
 * `inst` must be a live handle; `out` must be writable.
 */
CnnStatus cnn_run(const CnnInstance *inst, CnnTrace **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
CnnStatus cnn_trace_parse(const char *json, CnnTrace **out);

/**
 * # Safety
 * `trace` must be a live handle; `out` must be writable.
 */
CnnStatus cnn_trace_to_json(const CnnTrace *trace, char **out);

/**
 * Online cost of a trace: a float approximation and, if `out_exact` is
 * not null, the exact value as text (free with [`cnn_string_free`]).
 *
 * # Safety
 * `trace` must be a live handle; `out_float` must be writable.
 */
CnnStatus cnn_trace_cost(const CnnTrace *trace, double *out_float, char **out_exact);

/**
 * # Safety
 * `trace` must be null or a handle not yet freed.
 */
void cnn_trace_free(CnnTrace *trace);

/**
 * Checks that the potential never decreases along `trace` against `opt`.
 * Returns `Ok` or `VerificationFailed`; the report JSON is written to
 * `out_report` when it is not null.
 *
 * # Safety
 * Both handles must be live; `out_report` must be null or writable.
 */
CnnStatus cnn_verify(const CnnTrace *trace, const CnnTrajectory *opt, char **out_report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CNN_H */
