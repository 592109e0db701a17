#ifndef LPSPECTRA_H
#define LPSPECTRA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a call.
 */
typedef enum LpStatus {
  LP_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LP_STATUS_NULL_POINTER = 1,
  /**
   * Parameters violate a precondition.
   */
  LP_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A degree or domain guard fired.
   */
  LP_STATUS_DOMAIN_GUARD = 3,
  /**
   * Residual ratios failed to decay.
   */
  LP_STATUS_NOT_DECAYING = 4,
  /**
   * Overflow, step control or quadrature failure.
   */
  LP_STATUS_NUMERIC = 5,
  /**
   * An internal panic was caught at the boundary.
   */
  LP_STATUS_INTERNAL = 6,
} LpStatus;

/**
 * Closed-form warping families available through the C interface.
 */
typedef enum LpFamily {
  LP_FAMILY_EXP = 0,
  LP_FAMILY_SINH = 1,
  LP_FAMILY_COSH = 2,
} LpFamily;

/**
 * Opaque parabolic spectral region.
 */
typedef struct LpRegion LpRegion;

/**
 * Opaque spectrum of a hyperbolic quotient.
 */
typedef struct LpSpectrum LpSpectrum;

/**
 * Opaque warping function.
 */
typedef struct LpWarping LpWarping;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 *
 * The pointer stays valid until the next call into this library on the same thread.
 */
const char *lp_last_error(void);

/**
 * Creates `f(r) = c·g(√a0·r)` with `g` the chosen family, defined for `r ≥ c0`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle pointer.
 */
enum LpStatus lp_warping_new(enum LpFamily family,
                             double a0,
                             double c,
                             double c0,
                             struct LpWarping **out);

/**
 * # Safety
 * `w` must be null or a handle from [`lp_warping_new`] not yet freed.
 */
void lp_warping_free(struct LpWarping *w);

/**
 * `f(r)`, `f'(r)`, `f''(r)`.
 *
 * # Safety
 * `w` must be a live handle; output pointers must be valid.
 */
enum LpStatus lp_warping_eval(const struct LpWarping *w,
                              double r,
                              double *value,
                              double *first,
                              double *second);

/**
 * `ln f`, `f'/f` and `f''/f`, finite even where `f` itself overflows.
 *
 * # Safety
 * `w` must be a live handle; output pointers must be valid.
 */
enum LpStatus lp_warping_log_derivatives(const struct LpWarping *w,
                                         double r,
                                         double *ln_f,
                                         double *d1,
                                         double *d2);

/**
 * Region for dimension `n`, degree `k ≤ n/2`, exponent `p` (`INFINITY` allowed) and scale `a0`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum LpStatus lp_region_new(uint32_t n, uint32_t k, double p, double a0, struct LpRegion **out);

/**
 * # Safety
 * `region` must be null or a live handle.
 */
void lp_region_free(struct LpRegion *region);

/**
 * Vertex on the real axis and half width of the imaginary strip.
 *
 * # Safety
 * `region` must be a live handle; output pointers must be valid.
 */
enum LpStatus lp_region_shape(const struct LpRegion *region, double *vertex, double *half_width);

/**
 * Whether `re + i·im` lies within distance `tol` of the region.
 *
 * # Safety
 * `region` must be a live handle; `inside` must be valid.
 */
enum LpStatus lp_region_contains(const struct LpRegion *region,
                                 double re,
                                 double im,
                                 double tol,
                                 bool *inside);

/**
 * Euclidean distance from `re + i·im` to the region.
 *
 * # Safety
 * `region` must be a live handle; `distance` must be valid.
 */
enum LpStatus lp_region_distance(const struct LpRegion *region,
                                 double re,
                                 double im,
                                 double *distance);

/**
 * Point of the boundary curve at parameter `s`.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum LpStatus lp_curve_point(uint32_t n,
                             uint32_t k,
                             double p,
                             double a0,
                             double s,
                             double *re,
                             double *im);

/**
 * Eigenvalue candidate for the radial exponent chosen from `(p, s)`.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum LpStatus lp_candidate_lambda(uint32_t n,
                                  uint32_t k,
                                  double p,
                                  double a0,
                                  double lambda0,
                                  double s,
                                  double *re,
                                  double *im);

/**
 * Bottom of the essential spectrum; `volume_dependent` is set when it
 * depends on whether the volume is infinite.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum LpStatus lp_essential_bottom(uint32_t k,
                                  uint32_t n,
                                  double a0,
                                  bool infinite_volume,
                                  double *bottom,
                                  bool *volume_dependent);

/**
 * Spectrum of a quotient of hyperbolic `(N+1)`-space with the given real eigenvalues.
 *
 * # Safety
 * `eigenvalues` must point to `count` doubles (or be null with `count == 0`);
 * `out` must be valid.
 */
enum LpStatus lp_spectrum_new(uint32_t big_n,
                              uint32_t k,
                              double p,
                              const double *eigenvalues,
                              size_t count,
                              struct LpSpectrum **out);

/**
 * # Safety
 * `spectrum` must be null or a live handle.
 */
void lp_spectrum_free(struct LpSpectrum *spectrum);

/**
 * # Safety
 * `spectrum` must be a live handle; `member` must be valid.
 */
enum LpStatus lp_spectrum_contains(const struct LpSpectrum *spectrum,
                                   double re,
                                   double im,
                                   double tol,
                                   bool *member);

/**
 * Residual ratios of the approximate eigenform cut off to `[a, b]`.
 *
 * `ratio` is the bound assembled from the residual terms, `direct_ratio`
 * the ratio computed from the pointwise residual. Unit angular constants.
 *
 * # Safety
 * `w` must be a live handle; output pointers must be valid.
 */
enum LpStatus lp_residual_ratio(const struct LpWarping *w,
                                uint32_t n,
                                uint32_t k,
                                double p,
                                double lambda0,
                                double s,
                                double a,
                                double b,
                                double *ratio,
                                double *direct_ratio);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LPSPECTRA_H */
