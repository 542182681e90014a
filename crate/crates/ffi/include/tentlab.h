#ifndef TENTLAB_H
#define TENTLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LabMaximalMode {
  LAB_MAXIMAL_MODE_STANDARD = 0,
  LAB_MAXIMAL_MODE_DYADIC_SQUARE = 1,
  LAB_MAXIMAL_MODE_DYADIC_TENT = 2,
} LabMaximalMode;

typedef enum LabStatus {
  LAB_STATUS_OK = 0,
  LAB_STATUS_NULL_POINTER = 1,
  LAB_STATUS_DOMAIN = 2,
  LAB_STATUS_VALIDATION = 3,
  LAB_STATUS_CONSTRUCTION = 4,
  LAB_STATUS_CONFIG = 5,
  LAB_STATUS_IO = 6,
  /**
   * A run finished but raised invariant flags.
   */
  LAB_STATUS_FLAGGED = 7,
  LAB_STATUS_PANIC = 8,
} LabStatus;

/**
 * Polar quadrature grid handle.
 */
typedef struct LabGrid LabGrid;

/**
 * Positive measure handle.
 */
typedef struct LabMeasure LabMeasure;

/**
 * Radial weight handle.
 */
typedef struct LabWeight LabWeight;

typedef struct LabDoubling {
  double c;
  bool member;
  /**
   * NaN when not certified.
   */
  double beta;
  double gamma;
  double lambda0;
} LabDoubling;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Valid until the next failing call; never null.
 */
const char *lab_last_error_message(void);

/**
 * `ω(r) = (1 − r²)^α`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LabStatus lab_weight_standard(double alpha, struct LabWeight **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum LabStatus lab_weight_log(struct LabWeight **out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum LabStatus lab_weight_exponential(struct LabWeight **out);

/**
 * Tabulated weight from `n` increasing radii and values.
 *
 * # Safety
 * `r` and `omega` must point to `n` readable doubles; `out` must be valid for writes.
 */
enum LabStatus lab_weight_table(const double *r,
                                const double *omega,
                                size_t n,
                                struct LabWeight **out);

/**
 * # Safety
 * `w` must be null or a handle from a `lab_weight_*` constructor, not yet freed.
 */
void lab_weight_free(struct LabWeight *w);

/**
 * `ω̂(r) = ∫_r^1 ω`.
 *
 * # Safety
 * `w` must be a live weight handle; `out` must be valid for writes.
 */
enum LabStatus lab_weight_tail(const struct LabWeight *w, double r, double *out);

/**
 * # Safety
 * `w` must be a live weight handle; `out` must be valid for writes.
 */
enum LabStatus lab_weight_doubling(const struct LabWeight *w,
                                   double r_max,
                                   struct LabDoubling *out);

/**
 * Default grid at the given depth: outer radius `1 − 2^{−depth}`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LabStatus lab_grid_new(uint32_t depth, struct LabGrid **out);

/**
 * # Safety
 * `g` must be null or a handle from [`lab_grid_new`], not yet freed.
 */
void lab_grid_free(struct LabGrid *g);

/**
 * Number of cells; 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live grid handle.
 */
size_t lab_grid_len(const struct LabGrid *g);

/**
 * # Safety
 * `g` must be null or a live grid handle.
 */
double lab_grid_outer_radius(const struct LabGrid *g);

/**
 * Discrete measure `Σ m_k δ_{x_k + i y_k}`.
 *
 * # Safety
 * `x`, `y` and `mass` must point to `n` readable doubles; `out` must be valid for writes.
 */
enum LabStatus lab_measure_points(const double *x,
                                  const double *y,
                                  const double *mass,
                                  size_t n,
                                  struct LabMeasure **out);

/**
 * Seeded `delta`-lattice up to `r_max` with unit masses.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LabStatus lab_measure_lattice(double delta,
                                   double r_max,
                                   uint64_t seed,
                                   struct LabMeasure **out);

/**
 * `ω(S(z))(1 − |z|)^{−2} dA` on the grid.
 *
 * # Safety
 * `g` and `w` must be live handles; `out` must be valid for writes.
 */
enum LabStatus lab_measure_counterexample(const struct LabGrid *g,
                                          const struct LabWeight *w,
                                          struct LabMeasure **out);

/**
 * # Safety
 * `m` must be null or a handle from a `lab_measure_*` constructor, not yet freed.
 */
void lab_measure_free(struct LabMeasure *m);

/**
 * Number of support points (atoms or density cells).
 *
 * # Safety
 * `m` must be null or a live measure handle.
 */
size_t lab_measure_support_len(const struct LabMeasure *m);

/**
 * # Safety
 * `m` must be a live measure handle; `out` must be valid for writes.
 */
enum LabStatus lab_measure_total(const struct LabMeasure *m, double *out);

/**
 * `sup M_{ω,α}(μ)` over the chosen family up to dyadic level `n_max`, with grid ω masses.
 *
 * # Safety
 * All handles must be live; `out` must be valid for writes.
 */
enum LabStatus lab_maximal_sup(const struct LabMeasure *m,
                               const struct LabWeight *w,
                               const struct LabGrid *g,
                               double alpha,
                               enum LabMaximalMode mode,
                               uint32_t n_max,
                               double *out);

/**
 * `∫ A_{q,ν}(f)^q ω dA` for `f` given on the support of `ν` (aperture 1/2).
 *
 * # Safety
 * All handles must be live; `f` must point to `n` readable doubles; `out` must be valid for writes.
 */
enum LabStatus lab_tent_area_integral(const struct LabMeasure *nu,
                                      const struct LabWeight *w,
                                      const struct LabGrid *g,
                                      const double *f,
                                      size_t n,
                                      double q,
                                      double *out);

/**
 * `‖f‖_{T^p_q(ν, ω)}`; `q` may be infinite.
 *
 * # Safety
 * All handles must be live; `f` must point to `n` readable doubles; `out` must be valid for writes.
 */
enum LabStatus lab_tent_norm(const struct LabMeasure *nu,
                             const struct LabWeight *w,
                             const struct LabGrid *g,
                             const double *f,
                             size_t n,
                             double p,
                             double q,
                             double *out);

/**
 * Runs an experiment config and writes its report into `out_dir` (or the config's own
 * output directory when null). Returns `Flagged` when the run raised invariant flags.
 *
 * # Safety
 * `config` must be a NUL-terminated path; `out_dir` must be null or NUL-terminated.
 */
enum LabStatus lab_run_config(const char *config, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TENTLAB_H */
