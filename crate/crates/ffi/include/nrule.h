#ifndef NRULE_H
#define NRULE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  NR_STATUS_OK = 0,
  NR_STATUS_NULL_POINTER = 1,
  NR_STATUS_INVALID_UTF8 = 2,
  /**
   * JSON parse or validation failure.
   */
  NR_STATUS_CONFIG = 3,
  /**
   * The call needs a symbolic system and got a piecewise one, or vice versa.
   */
  NR_STATUS_WRONG_MODE = 4,
  NR_STATUS_INVALID_ARGUMENT = 5,
  /**
   * The induced map has |scale| = 1.
   */
  NR_STATUS_NEUTRAL = 6,
  NR_STATUS_NOT_INVERTIBLE = 7,
  /**
   * An orbit reached an invariant point.
   */
  NR_STATUS_DEGENERATE = 8,
  NR_STATUS_NOT_CONVERGED = 9,
  NR_STATUS_BUFFER_TOO_SMALL = 10,
  NR_STATUS_PANIC = 11,
} NrStatus;

/**
 * Opaque handle to a validated system.
 */
typedef struct NrSystem NrSystem;

typedef struct {
  double x;
  double y;
} NrPoint;

/**
 * `t ↦ scale·t + shift` on the induced line's arc-length parameter.
 */
typedef struct {
  double scale;
  double shift;
} NrAffine;

/**
 * Angles in radians.
 */
typedef struct {
  bool satisfied;
  double mean_theta;
  double delta;
  double margin;
} NrAccReport;

typedef struct {
  /**
   * Points written, including the start. On `BufferTooSmall` this is the
   * capacity the run needs.
   */
  size_t count;
  /**
   * Detected period in rule applications, 0 when none.
   */
  size_t period;
  bool degenerate;
  bool escaped;
} NrSimulation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL-terminated,
 * truncated to `len`) and returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t nr_last_error_message(char *buf, size_t len);

/**
 * Parses and validates a JSON config. On success `*out` owns a new handle
 * that must be released with `nr_system_free`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
NrStatus nr_system_from_json(const char *json, NrSystem **out);

/**
 * # Safety
 * `sys` must be null or a handle from `nr_system_from_json` not yet freed.
 */
void nr_system_free(NrSystem *sys);

/**
 * Writes true for symbolic systems and false for piecewise ones.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_system_is_symbolic(const NrSystem *sys, bool *out);

/**
 * Number of rules in the cycle.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_system_rule_count(const NrSystem *sys, size_t *out);

/**
 * The configured start point, or the seeded default the CLI would use.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_system_default_start(const NrSystem *sys, NrPoint *out);

/**
 * Composite affine action of one full symbolic cycle.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_cycle_affine(const NrSystem *sys, NrAffine *out);

/**
 * Product of the per-rule similarity coefficients.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_induced_coefficient(const NrSystem *sys, double *out);

/**
 * Unique fixed point of the induced map on the last rule's target line.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_fixed_point(const NrSystem *sys, NrPoint *out);

/**
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_is_collapsing(const NrSystem *sys, bool *out);

/**
 * Applies one full cycle to `x`.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_cycle(const NrSystem *sys, NrPoint x, NrPoint *out);

/**
 * Preimage of `y` (on the induced line) under one full cycle.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_symbolic_invert(const NrSystem *sys, NrPoint y, NrPoint *out);

/**
 * Average contraction check of a piecewise system.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_piecewise_acc_check(const NrSystem *sys, NrAccReport *out);

/**
 * Number of invariant points of a piecewise system.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
NrStatus nr_piecewise_invariant_count(const NrSystem *sys, size_t *out);

/**
 * Product of the away-branch coefficients of two angles at intersection
 * angle `delta` (radians).
 *
 * # Safety
 * `out` must be writable.
 */
NrStatus nr_separation_product(double theta1, double theta2, double delta, double *out);

/**
 * Projects `x` at angle `theta` onto the line through `line_point` at
 * direction angle `line_angle` (radians).
 *
 * # Safety
 * `out` must be writable.
 */
NrStatus nr_project(NrPoint x,
                    double theta,
                    uint8_t orientation_bit,
                    NrPoint line_point,
                    double line_angle,
                    NrPoint *out);

/**
 * Iterates `steps` rule applications from `start`, writing the orbit
 * (start first) into `points[..capacity]`. A run that stops at an
 * invariant point still returns `Ok` with `degenerate` set.
 *
 * # Safety
 * `sys` must be a live handle; `points` must hold `capacity` elements;
 * `summary` must be writable.
 */
NrStatus nr_simulate(const NrSystem *sys,
                     NrPoint start,
                     size_t steps,
                     NrPoint *points,
                     size_t capacity,
                     NrSimulation *summary);

/**
 * Runs up to `max_steps` applications from `start` and reports the limit
 * period `k·n` for the smallest `k ≤ k_max` the tail confirms.
 *
 * # Safety
 * `sys` must be a live handle; `period` must be writable.
 */
NrStatus nr_detect_period(const NrSystem *sys,
                          NrPoint start,
                          size_t max_steps,
                          size_t k_max,
                          size_t *period);

/**
 * Builds a closed curve over the system's lines: vertex `k` lies on
 * `labels[k]` and segment `k` meets it at `angles_deg[k]`. Writes `n`
 * vertices to `vertices`.
 *
 * # Safety
 * `sys` must be a live handle; `angles_deg` and `labels` must hold `n`
 * elements, each label NUL-terminated; `vertices` must hold `n` elements.
 */
NrStatus nr_build_curve(const NrSystem *sys,
                        const double *angles_deg,
                        const char *const *labels,
                        size_t n,
                        NrPoint *vertices);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NRULE_H */
