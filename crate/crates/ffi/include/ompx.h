#ifndef OMPX_H
#define OMPX_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/*
 Status code returned by every fallible call.
 */
typedef enum OmpxStatus {
  OMPX_STATUS_OK = 0,
  OMPX_STATUS_NULL_POINTER = 1,
  OMPX_STATUS_INVALID_ARGUMENT = 2,
  OMPX_STATUS_SHAPE_MISMATCH = 3,
  /*
   The selected atoms became linearly dependent; recovery stopped.
   */
  OMPX_STATUS_DEGENERATE_ATOM_SET = 4,
  /*
   The explicit 1D dictionary would exceed the memory cap.
   */
  OMPX_STATUS_MEMORY_CAP = 5,
  OMPX_STATUS_BUFFER_TOO_SMALL = 6,
  OMPX_STATUS_IO = 7,
  OMPX_STATUS_INTERNAL = 8,
} OmpxStatus;

/*
 Why a recovery run stopped.
 */
typedef enum OmpxTermination {
  OMPX_TERMINATION_SPARSITY_REACHED = 0,
  OMPX_TERMINATION_RESIDUAL_BELOW_TOLERANCE = 1,
  OMPX_TERMINATION_ATOMS_EXHAUSTED = 2,
} OmpxTermination;

/*
 A generated problem instance: dictionary, sparse truth, and samples.
 */
typedef struct OmpxInstance OmpxInstance;

/*
 Output of one recovery run.
 */
typedef struct OmpxResult OmpxResult;

/*
 Multiply-add counts per phase of a recovery run.
 */
typedef struct OmpxFlops {
  uint64_t project;
  uint64_t weights;
  uint64_t residual;
} OmpxFlops;

/*
 Library version as a static NUL-terminated string.
 */
const char *ompx_version(void);

/*
 Message of the last failed call on this thread, or NULL if the last call
 succeeded. Valid until the next `ompx_` call on the same thread.
 */
const char *ompx_last_error(void);

/*
 Generates an instance: orthonormal DCT transform, Gaussian sensing matrix,
 and a `k`-sparse `n × n` signal, all derived from `seed`.

 # Safety
 `out` must be valid for writing one pointer.
 */
enum OmpxStatus ompx_instance_new(size_t n,
                                  size_t m,
                                  size_t k,
                                  uint64_t seed,
                                  struct OmpxInstance **out);

/*
 # Safety
 `instance` must be NULL or a handle from [`ompx_instance_new`] not yet freed.
 */
void ompx_instance_free(struct OmpxInstance *instance);

/*
 Writes the side length `n`, sample size `m`, and sparsity `k`. Any output
 pointer may be NULL.

 # Safety
 `instance` must be a live handle; non-NULL outputs must be writable.
 */
enum OmpxStatus ompx_instance_dims(const struct OmpxInstance *instance,
                                   size_t *n,
                                   size_t *m,
                                   size_t *k);

/*
 Copies the `m × m` sample matrix `Y`.

 # Safety
 `instance` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_instance_copy_y(const struct OmpxInstance *instance,
                                     double *buf,
                                     size_t capacity);

/*
 Copies the `m × n` effective dictionary `A`.

 # Safety
 `instance` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_instance_copy_a(const struct OmpxInstance *instance,
                                     double *buf,
                                     size_t capacity);

/*
 Copies the true `n × n` sparse signal `Z`.

 # Safety
 `instance` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_instance_copy_z(const struct OmpxInstance *instance,
                                     double *buf,
                                     size_t capacity);

/*
 Recovers an instance with 2D-OMP.

 # Safety
 `instance` must be a live handle; `out` must be valid for writing one pointer.
 */
enum OmpxStatus ompx_instance_omp2d(const struct OmpxInstance *instance,
                                    size_t k,
                                    double tol,
                                    struct OmpxResult **out);

/*
 Recovers an instance with 1D-OMP over the explicit `m² × n²` dictionary.
 `memory_cap_bytes == 0` means no cap.

 # Safety
 `instance` must be a live handle; `out` must be valid for writing one pointer.
 */
enum OmpxStatus ompx_instance_omp1d(const struct OmpxInstance *instance,
                                    size_t k,
                                    double tol,
                                    uint64_t memory_cap_bytes,
                                    struct OmpxResult **out);

/*
 2D-OMP on caller data: `a` is `m × n`, `y` is `m × m`, both row-major.

 # Safety
 `a` must hold `m * n` doubles, `y` must hold `m * m` doubles, and `out`
 must be valid for writing one pointer.
 */
enum OmpxStatus ompx_omp2d(const double *a,
                           size_t m,
                           size_t n,
                           const double *y,
                           size_t k,
                           double tol,
                           struct OmpxResult **out);

/*
 1D-OMP on caller data; see [`ompx_omp2d`] for the layout and
 [`ompx_instance_omp1d`] for the cap.

 # Safety
 As for [`ompx_omp2d`].
 */
enum OmpxStatus ompx_omp1d(const double *a,
                           size_t m,
                           size_t n,
                           const double *y,
                           size_t k,
                           double tol,
                           uint64_t memory_cap_bytes,
                           struct OmpxResult **out);

/*
 # Safety
 `result` must be NULL or a handle from a recovery call not yet freed.
 */
void ompx_result_free(struct OmpxResult *result);

/*
 Number of completed iterations; also the length of the selection, weight,
 and residual-norm arrays. Returns 0 for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
size_t ompx_result_iterations(const struct OmpxResult *result);

/*
 Side length `n`; the coefficient matrix holds `n * n` values. Returns 0
 for NULL.

 # Safety
 `result` must be NULL or a live handle.
 */
size_t ompx_result_n(const struct OmpxResult *result);

/*
 # Safety
 `result` must be a live handle; `out` must be writable.
 */
enum OmpxStatus ompx_result_termination(const struct OmpxResult *result, enum OmpxTermination *out);

/*
 # Safety
 `result` must be a live handle; `out` must be writable.
 */
enum OmpxStatus ompx_result_flops(const struct OmpxResult *result, struct OmpxFlops *out);

/*
 Copies the selected atoms in selection order as 1-based flat indices.

 # Safety
 `result` must be a live handle; `buf` must hold `capacity` values.
 */
enum OmpxStatus ompx_result_copy_selected(const struct OmpxResult *result,
                                          size_t *buf,
                                          size_t capacity);

/*
 Copies the final weights, aligned with the selection.

 # Safety
 `result` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_result_copy_weights(const struct OmpxResult *result,
                                         double *buf,
                                         size_t capacity);

/*
 Copies the residual norm after each iteration.

 # Safety
 `result` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_result_copy_residual_norms(const struct OmpxResult *result,
                                                double *buf,
                                                size_t capacity);

/*
 Copies the recovered `n × n` coefficient matrix.

 # Safety
 `result` must be a live handle; `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_result_copy_coefficients(const struct OmpxResult *result,
                                              double *buf,
                                              size_t capacity);

/*
 Writes the orthonormal `n × n` DCT-II matrix.

 # Safety
 `buf` must hold `capacity` doubles.
 */
enum OmpxStatus ompx_dct_matrix(size_t n, double *buf, size_t capacity);

#endif  /* OMPX_H */
