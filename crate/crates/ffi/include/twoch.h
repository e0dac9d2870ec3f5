#ifndef TWOCH_H
#define TWOCH_H

/* Generated by cbindgen from the twoch-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Two-sided weight.
 */
#define TWOCH_SIDE_BOTH 0

/**
 * Weight acting on x >= 0 only.
 */
#define TWOCH_SIDE_RIGHT 1

/**
 * Literal |x| in the exponential factor.
 */
#define TWOCH_SMOOTHING_EXACT 0

/**
 * Regularized |x| in the exponential factor.
 */
#define TWOCH_SMOOTHING_REGULARIZED 1

/**
 * Pick exact for b in {0,1}, regularized otherwise.
 */
#define TWOCH_SMOOTHING_DEFAULT -1

/**
 * Status codes returned by every fallible call.
 */
typedef enum {
  TWOCH_STATUS_OK = 0,
  TWOCH_STATUS_NULL_POINTER = 1,
  TWOCH_STATUS_INVALID_ARGUMENT = 2,
  TWOCH_STATUS_NOT_ADMISSIBLE = 3,
  TWOCH_STATUS_PRECONDITION_FAILED = 4,
  TWOCH_STATUS_BLOW_UP = 5,
  TWOCH_STATUS_DOMAIN_TOO_SMALL = 6,
  TWOCH_STATUS_INFINITE_NORM = 7,
  TWOCH_STATUS_WINDOW_ERROR = 8,
  TWOCH_STATUS_STRIDE_TOO_COARSE = 9,
  TWOCH_STATUS_RANGE_ERROR = 10,
  TWOCH_STATUS_UNBOUNDED_DERIVATIVE = 11,
  TWOCH_STATUS_IO_ERROR = 12,
  TWOCH_STATUS_INTERNAL_ERROR = 13,
} TwochStatus;

/**
 * Opaque trajectory handle.
 */
typedef struct TwochTrajectory TwochTrajectory;

/**
 * Opaque weight handle.
 */
typedef struct TwochWeight TwochWeight;

/**
 * Moderateness certificate, plain data across the boundary.
 */
typedef struct {
  double c_mod;
  double a_bound;
  double v_integral;
  double dgv_l1;
  double gv_l1;
  double sample_box;
} TwochCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code.
 */
const char *twoch_status_message(TwochStatus status);

/**
 * Build a weight e^{a|x|^b} (1+|x|)^c (log(e+|x|))^d.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_weight_new(double a,
                             double b,
                             double c,
                             double d,
                             int side,
                             int smoothing,
                             TwochWeight **out);

/**
 * Parse a key=value weight block (`a=`, `b=`, `c=`, `d=`, `side=`,
 * `smoothing=`).
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_weight_parse(const char *text, TwochWeight **out);

/**
 * Evaluate the weight at x.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_weight_eval(const TwochWeight *weight, double x, double *out);

/**
 * True (1) when the weight satisfies a >= 0, 0 <= b <= 1, ab < 1.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
int twoch_weight_admissible(const TwochWeight *weight);

/**
 * Certify moderateness: the constant c_mod against the standard
 * companion, the derivative bound A, and the kernel integrals.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_weight_certify(const TwochWeight *weight,
                                 double sample_box,
                                 uintptr_t samples,
                                 TwochCertificate *out);

/**
 * The traced Gronwall constant for a certificate.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_gronwall_constant(const TwochCertificate *cert, double *out);

/**
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
void twoch_weight_free(TwochWeight *weight);

/**
 * Integrate a run described by a key=value config (same format as the
 * CLI) and return a trajectory handle.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_simulate(const char *config_text, TwochTrajectory **out);

/**
 * Number of stored snapshots.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
uintptr_t twoch_trajectory_len(const TwochTrajectory *traj);

/**
 * Number of grid points per snapshot.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
uintptr_t twoch_trajectory_grid_len(const TwochTrajectory *traj);

/**
 * Time of snapshot `index`.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_trajectory_time(const TwochTrajectory *traj, uintptr_t index, double *out);

/**
 * Copy snapshot `index` into caller-provided buffers of length `len`
 * (= grid length). Null buffers are skipped.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_trajectory_fields(const TwochTrajectory *traj,
                                    uintptr_t index,
                                    double *x,
                                    double *u,
                                    double *rho,
                                    uintptr_t len);

/**
 * Run outcome: writes the breakdown time and returns 1 on blow-up,
 * returns 0 for a completed run.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
int twoch_trajectory_outcome(const TwochTrajectory *traj, double *blow_up_time);

/**
 * Verify the weighted persistence bound N(t) <= e^{CMt} N(0) along the
 * trajectory. `p_is_inf` selects the sup norm, otherwise `p` >= 1 is the
 * norm order. Writes the verdict (1 pass / 0 fail), the traced constant,
 * the run-wide M and the worst margin relative to the bound.
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
TwochStatus twoch_verify_persistence(const TwochTrajectory *traj,
                                     const TwochWeight *weight,
                                     int p_is_inf,
                                     double p,
                                     int *pass,
                                     double *c_used,
                                     double *m_sup,
                                     double *worst_margin);

/**
 * # Safety
 * Pointer arguments must be valid (or null where documented); handles
 * must have been created by this library and not yet freed.
 */
void twoch_trajectory_free(TwochTrajectory *traj);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* TWOCH_H */
