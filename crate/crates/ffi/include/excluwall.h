#ifndef EXCLUWALL_H
#define EXCLUWALL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum ExclStatus {
  EXCL_STATUS_OK = 0,
  EXCL_STATUS_NULL_POINTER = 1,
  EXCL_STATUS_INVALID_ARGUMENT = 2,
  EXCL_STATUS_OUT_OF_RANGE = 3,
  EXCL_STATUS_PRECONDITION = 4,
  EXCL_STATUS_BUFFER_TOO_SMALL = 5,
  EXCL_STATUS_INTERNAL = 6,
} ExclStatus;

/**
 * Per-site Poisson clocks.
 */
typedef struct ExclClockField ExclClockField;

/**
 * Simulated particle paths.
 */
typedef struct ExclTrajectory ExclTrajectory;

/**
 * Nondecreasing piecewise-linear wall.
 */
typedef struct ExclWall ExclWall;

/**
 * Two-sided estimate of the wall identity at one level.
 */
typedef struct ExclIdentityEstimate {
  double p_lhs;
  double lhs_lo;
  double lhs_hi;
  double p_rhs;
  double rhs_lo;
  double rhs_hi;
  /**
   * 1 when the two intervals overlap.
   */
  int32_t verdict;
} ExclIdentityEstimate;

/**
 * Limit law family: 0 GUE, 1 GOE, 2 product of two GOE, 3 Airy 2->1.
 */
typedef struct ExclRegime {
  double xi;
  int32_t law;
  uint32_t n_scales;
  double scales[2];
  uint32_t n_influence;
  double influence[2];
} ExclRegime;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. Valid until the
 * next failing call on the same thread.
 */
const char *excl_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *excl_version(void);

/**
 * Creates clocks for `seed` on `[0, horizon]`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ExclStatus excl_clockfield_new(uint64_t seed, double horizon, struct ExclClockField **out);

/**
 * # Safety
 * `h` must come from [`excl_clockfield_new`] and not be used afterwards; null is ignored.
 */
void excl_clockfield_free(struct ExclClockField *h);

/**
 * First ring of site `z` after `after`; `*found` is 0 if none before the horizon.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ExclStatus excl_clockfield_next_event(struct ExclClockField *h,
                                           int64_t z,
                                           double after,
                                           double *out_time,
                                           int32_t *found);

/**
 * Wall from `n_knots` triples `(t, left value, jump)` stored consecutively in `knots`.
 *
 * # Safety
 * `knots` must hold `3 * n_knots` doubles; `out` must be valid.
 */
enum ExclStatus excl_wall_new(const double *knots, size_t n_knots, struct ExclWall **out);

/**
 * The kinked example wall for horizon `horizon`.
 *
 * # Safety
 * `out` must be valid.
 */
enum ExclStatus excl_wall_example(double horizon, struct ExclWall **out);

/**
 * # Safety
 * `h` must come from a wall constructor and not be used afterwards; null is ignored.
 */
void excl_wall_free(struct ExclWall *h);

/**
 * # Safety
 * Pointers must be valid.
 */
enum ExclStatus excl_wall_eval(const struct ExclWall *h, double t, double *out);

/**
 * Runs TASEP from `n` strictly decreasing `positions` up to `horizon`, with an
 * optional right wall (`wall` may be null), driven by `clocks`.
 *
 * # Safety
 * `positions` must hold `n` values; other non-nullable pointers must be valid.
 */
enum ExclStatus excl_simulate(const int64_t *positions,
                              size_t n,
                              const struct ExclWall *wall,
                              double horizon,
                              struct ExclClockField *clocks,
                              struct ExclTrajectory **out);

/**
 * # Safety
 * `h` must come from [`excl_simulate`] and not be used afterwards; null is ignored.
 */
void excl_trajectory_free(struct ExclTrajectory *h);

/**
 * Number of labels in the trajectory, 0 for null.
 *
 * # Safety
 * `h` must be valid or null.
 */
size_t excl_trajectory_len(const struct ExclTrajectory *h);

/**
 * Position of `label` (from 1) at time `t`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum ExclStatus excl_trajectory_position(const struct ExclTrajectory *h,
                                         size_t label,
                                         double t,
                                         int64_t *out);

/**
 * Copies the final positions into `out`, which must have room for `len` values.
 *
 * # Safety
 * `out` must hold `len` values.
 */
enum ExclStatus excl_trajectory_final_positions(const struct ExclTrajectory *h,
                                                int64_t *out,
                                                size_t len);

/**
 * `x_label(T)` for `samples` independent replicas, written to `out`.
 *
 * # Safety
 * `ic_json` must be a NUL-terminated string, `out` must hold `samples` values,
 * `wall` may be null.
 */
enum ExclStatus excl_tagged_samples(const char *ic_json,
                                    const struct ExclWall *wall,
                                    size_t label,
                                    double horizon,
                                    size_t samples,
                                    uint64_t seed,
                                    size_t threads,
                                    int64_t *out);

/**
 * Estimates `P(x^f_n(T) > s)` directly and through the step-TASEP representation.
 *
 * # Safety
 * `ic_json` must be a NUL-terminated string, `out` valid, `wall` may be null.
 */
enum ExclStatus excl_estimate_identity(const char *ic_json,
                                       const struct ExclWall *wall,
                                       size_t n,
                                       double horizon,
                                       int64_t s,
                                       size_t samples,
                                       uint64_t seed,
                                       size_t threads,
                                       struct ExclIdentityEstimate *out);

/**
 * Checks the colour-position symmetry for the swap word of `len` sites; `*holds` is 0 or 1.
 *
 * # Safety
 * `word` must hold `len` values (may be null when `len` is 0); `holds` valid.
 */
enum ExclStatus excl_colour_position_check(const int64_t *word, size_t len, int32_t *holds);

/**
 * Regime of label `alpha T` under the kinked example wall with half-`d`-periodic data.
 *
 * # Safety
 * `out` must be valid.
 */
enum ExclStatus excl_classify(double d, double alpha, struct ExclRegime *out);

/**
 * Wilson score interval for `k` successes in `n` trials.
 *
 * # Safety
 * `lo` and `hi` must be valid.
 */
enum ExclStatus excl_wilson_ci(uint64_t k, uint64_t n, double level, double *lo, double *hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXCLUWALL_H */
