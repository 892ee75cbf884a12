#ifndef CVQKD_REC_H
#define CVQKD_REC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum CvqkdStatus {
  CVQKD_OK = 0,
  CVQKD_NULL_POINTER = 1,
  CVQKD_INVALID_ARGUMENT = 2,
  CVQKD_LENGTH_MISMATCH = 3,
  CVQKD_DOMAIN = 4,
  CVQKD_CONSTRUCTION = 5,
  CVQKD_PARSE = 6,
  CVQKD_IO = 7,
  CVQKD_INTERNAL = 8,
} CvqkdStatus;

/**
 * Opaque degree distribution.
 */
typedef struct CvqkdDistribution CvqkdDistribution;

/**
 * Opaque parity-check matrix.
 */
typedef struct CvqkdMatrix CvqkdMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static, NUL-terminated description of a status code.
 */
const char *cvqkd_status_message(enum CvqkdStatus status);

/**
 * Looks up a preset by name (`rate_0_1`, `0.05`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum CvqkdStatus cvqkd_distribution_preset(const char *name, struct CvqkdDistribution **out);

/**
 * Parses the text form of a distribution.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum CvqkdStatus cvqkd_distribution_parse(const char *text, struct CvqkdDistribution **out);

/**
 * Design rate `Σν − Σμ`.
 *
 * # Safety
 * `dist` must come from this library; `out` must be writable.
 */
enum CvqkdStatus cvqkd_distribution_rate(const struct CvqkdDistribution *dist, double *out);

/**
 * # Safety
 * `dist` must come from this library and not be used afterwards.
 */
void cvqkd_distribution_free(struct CvqkdDistribution *dist);

/**
 * Builds an `n`-column matrix by progressive edge growth.
 *
 * # Safety
 * `dist` must come from this library; `out` must be writable.
 */
enum CvqkdStatus cvqkd_matrix_build(const struct CvqkdDistribution *dist,
                                    uintptr_t n,
                                    uint64_t seed,
                                    struct CvqkdMatrix **out);

/**
 * Loads an alist file (and its `.meta` sidecar if present).
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum CvqkdStatus cvqkd_matrix_load(const char *path, struct CvqkdMatrix **out);

/**
 * Writes the alist file and its `.meta` sidecar.
 *
 * # Safety
 * `matrix` must come from this library; `path` must be NUL-terminated.
 */
enum CvqkdStatus cvqkd_matrix_save(const struct CvqkdMatrix *matrix, const char *path);

/**
 * # Safety
 * `matrix` must come from this library; `n` and `m` must be writable.
 */
enum CvqkdStatus cvqkd_matrix_dims(const struct CvqkdMatrix *matrix, uintptr_t *n, uintptr_t *m);

/**
 * `H·bits` over GF(2).
 *
 * # Safety
 * `bits` must hold `n` bytes and `out` `m` bytes.
 */
enum CvqkdStatus cvqkd_matrix_syndrome(const struct CvqkdMatrix *matrix,
                                       const uint8_t *bits,
                                       uintptr_t n,
                                       uint8_t *out,
                                       uintptr_t m);

/**
 * Sum-product decoding toward `syndrome`.
 *
 * `pinned` may be NULL; otherwise it holds `n` flags and pinned positions
 * must carry LLRs of exactly ±30. On return `bits_out` holds the estimate
 * and `success` is 1 iff it satisfies the syndrome. A failed decode is not
 * an error.
 *
 * # Safety
 * Array arguments must hold the stated number of elements; out-pointers
 * must be writable.
 */
enum CvqkdStatus cvqkd_decode(const struct CvqkdMatrix *matrix,
                              const double *llrs,
                              uintptr_t n,
                              const uint8_t *syndrome,
                              uintptr_t m,
                              const uint8_t *pinned,
                              uintptr_t max_iters,
                              uint8_t *bits_out,
                              uintptr_t *iterations,
                              uint8_t *success);

/**
 * # Safety
 * `matrix` must come from this library and not be used afterwards.
 */
void cvqkd_matrix_free(struct CvqkdMatrix *matrix);

/**
 * `(n − m − s)/(n − p − s)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CvqkdStatus cvqkd_adapted_rate(uintptr_t n,
                                    uintptr_t m,
                                    uintptr_t s,
                                    uintptr_t p,
                                    double *out);

/**
 * `beta · ½log₂(1 + snr)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CvqkdStatus cvqkd_optimal_rate(double snr, double beta, double *out);

/**
 * Coefficients `α` of the orthogonal map taking the unit vector `y_unit`
 * to `u`.
 *
 * # Safety
 * Each pointer must address 8 doubles.
 */
enum CvqkdStatus cvqkd_map_coefficients(const double *y_unit, const double *u, double *alpha_out);

/**
 * `v = M(α)·x_unit`.
 *
 * # Safety
 * Each pointer must address 8 doubles.
 */
enum CvqkdStatus cvqkd_apply_mapping(const double *x_unit, const double *alpha, double *v_out);

/**
 * Per-coordinate LLRs of a mapped block; positive means bit 0.
 *
 * # Safety
 * `v` and `out` must each address 8 doubles.
 */
enum CvqkdStatus cvqkd_block_llrs(const double *v,
                                  double snr,
                                  double x_norm,
                                  double y_norm,
                                  double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CVQKD_REC_H */
