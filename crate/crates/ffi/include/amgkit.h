#ifndef AMGKIT_H
#define AMGKIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define AMG_AGGREGATION_VMB 0

#define AMG_AGGREGATION_MATCHING 1

#define AMG_SMOOTHER_L1JACOBI 0

#define AMG_SMOOTHER_AINV 1

#define AMG_CYCLE_V 0

#define AMG_CYCLE_VARIABLE_V 1

#define AMG_COARSE_PCG 0

#define AMG_COARSE_SWEEPS 1

#define AMG_FORMAT_CSR 0

#define AMG_FORMAT_ELL 1

#define AMG_FORMAT_HLL 2

#define AMG_PRESET_VBM 0

#define AMG_PRESET_SMATCH 1

#define AMG_PRESET_VMATCH 2

#define AMG_METHOD_CG 0

#define AMG_METHOD_FCG 1

/**
 * Result code of every fallible call.
 */
typedef enum AmgStatus {
  AMG_STATUS_OK = 0,
  AMG_STATUS_NULL_POINTER = 1,
  AMG_STATUS_INVALID_ARGUMENT = 2,
  AMG_STATUS_SPARSE_ERROR = 3,
  AMG_STATUS_HIERARCHY_ERROR = 4,
  AMG_STATUS_SMOOTHER_ERROR = 5,
  AMG_STATUS_SOLVE_ERROR = 6,
  AMG_STATUS_NOT_CONVERGED = 7,
  AMG_STATUS_PANIC = 8,
} AmgStatus;

/**
 * Opaque sparse matrix.
 */
typedef struct AmgMatrix AmgMatrix;

/**
 * Opaque AMG preconditioner: hierarchy with smoothers attached.
 */
typedef struct AmgPrecond AmgPrecond;

/**
 * Preconditioner construction options. Fill with
 * [`amg_precond_options_default`] before changing individual fields.
 */
typedef struct AmgPrecondOptions {
  /**
   * `AMG_AGGREGATION_*`
   */
  uint32_t aggregation;
  double theta;
  size_t match_sweeps;
  bool smooth_prolongator;
  /**
   * `AMG_SMOOTHER_*`
   */
  uint32_t smoother;
  double ainv_drop_tol;
  size_t pre_sweeps;
  size_t post_sweeps;
  /**
   * `AMG_CYCLE_*`
   */
  uint32_t cycle;
  /**
   * `AMG_COARSE_*`
   */
  uint32_t coarse_solver;
  size_t coarse_iterations;
  size_t coarse_size_target;
  size_t max_levels;
} AmgPrecondOptions;

/**
 * Outcome of a Krylov solve.
 */
typedef struct AmgSolveInfo {
  size_t iterations;
  double relative_residual;
  bool converged;
  double solve_time;
} AmgSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *amg_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *amg_version(void);

/**
 * Creates a matrix from CSR arrays. Column indices in each row must be
 * strictly increasing.
 */
enum AmgStatus amg_matrix_from_csr(size_t n_rows,
                                   size_t n_cols,
                                   const size_t *row_ptr,
                                   const size_t *col_idx,
                                   const double *values,
                                   struct AmgMatrix **out);

/**
 * Creates a matrix from coordinate triples; duplicates are summed.
 */
enum AmgStatus amg_matrix_from_coo(size_t n_rows,
                                   size_t n_cols,
                                   size_t nnz,
                                   const size_t *rows,
                                   const size_t *cols,
                                   const double *values,
                                   struct AmgMatrix **out);

/**
 * 7-point Poisson matrix on an `nx × ny × nz` grid. When `rhs` is not null
 * it receives the matching right-hand side (length `nx·ny·nz`).
 */
enum AmgStatus amg_matrix_poisson7(size_t nx,
                                   size_t ny,
                                   size_t nz,
                                   double *rhs,
                                   struct AmgMatrix **out);

void amg_matrix_free(struct AmgMatrix *m);

/**
 * Number of rows; 0 for a null handle.
 */
size_t amg_matrix_rows(const struct AmgMatrix *m);

/**
 * Number of columns; 0 for a null handle.
 */
size_t amg_matrix_cols(const struct AmgMatrix *m);

/**
 * Stored nonzeros (padding excluded); 0 for a null handle.
 */
size_t amg_matrix_nnz(const struct AmgMatrix *m);

/**
 * Switches the storage layout (`AMG_FORMAT_*`).
 */
enum AmgStatus amg_matrix_convert(struct AmgMatrix *m, uint32_t format, size_t hack_size);

/**
 * y ← αAx + βy.
 */
enum AmgStatus amg_matrix_spmv(const struct AmgMatrix *m,
                               double alpha,
                               const double *x,
                               double beta,
                               double *y);

/**
 * Replaces existing coefficients; every `(row, col)` must already be
 * stored. On error the matrix is unchanged.
 */
enum AmgStatus amg_matrix_update(struct AmgMatrix *m,
                                 size_t count,
                                 const size_t *rows,
                                 const size_t *cols,
                                 const double *values);

/**
 * Fills `out` with the options of a named configuration (`AMG_PRESET_*`).
 */
enum AmgStatus amg_precond_options_default(uint32_t preset, struct AmgPrecondOptions *out);

/**
 * Builds the hierarchy and its smoothers for a symmetric matrix with
 * positive diagonal. `opts` may be null for the VBM configuration.
 */
enum AmgStatus amg_precond_build(const struct AmgMatrix *a,
                                 const struct AmgPrecondOptions *opts,
                                 struct AmgPrecond **out);

/**
 * Replaces coefficients of the finest-level matrix and rebuilds the
 * smoothers, keeping the coarse levels.
 */
enum AmgStatus amg_precond_update_fine(struct AmgPrecond *p,
                                       size_t count,
                                       const size_t *rows,
                                       const size_t *cols,
                                       const double *values);

void amg_precond_free(struct AmgPrecond *p);

/**
 * Number of levels; 0 for a null handle.
 */
size_t amg_precond_levels(const struct AmgPrecond *p);

/**
 * Operator complexity; 0 for a null handle.
 */
double amg_precond_operator_complexity(const struct AmgPrecond *p);

/**
 * Unknowns on level `level`; 0 if out of range or null.
 */
size_t amg_precond_level_size(const struct AmgPrecond *p, size_t level);

/**
 * z ← B r for one multigrid cycle; both vectors have length `n`.
 */
enum AmgStatus amg_precond_apply(const struct AmgPrecond *p, size_t n, const double *r, double *z);

/**
 * Solves A x = b with CG or FCG (`AMG_METHOD_*`). `x` holds the initial
 * guess on entry and the solution on exit. `p` may be null for no
 * preconditioning. Returns [`AmgStatus::NotConverged`] when the iteration
 * cap is hit; `info` (optional) is filled in either case.
 */
enum AmgStatus amg_solve(const struct AmgMatrix *a,
                         const struct AmgPrecond *p,
                         uint32_t method,
                         size_t n,
                         const double *b,
                         double *x,
                         double tol,
                         size_t max_iterations,
                         struct AmgSolveInfo *info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AMGKIT_H */
