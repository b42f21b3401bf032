#ifndef QGAMMA_H
#define QGAMMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes.
 */
typedef enum QgStatus {
  QG_STATUS_OK = 0,
  QG_STATUS_NULL_POINTER = 1,
  QG_STATUS_INVALID_ARGUMENT = 2,
  QG_STATUS_DOMAIN = 3,
  QG_STATUS_RANGE = 4,
  QG_STATUS_PRECISION = 5,
  QG_STATUS_PLAN = 6,
  QG_STATUS_INTERNAL = 7,
} QgStatus;

/**
 * Outcome of one irrationality test.
 */
typedef struct QgCertificate QgCertificate;

/**
 * A decomposition `I = c·γ + L − A`.
 */
typedef struct QgDecomposition QgDecomposition;

/**
 * A real number with a rigorous absolute error bound.
 */
typedef struct QgReal QgReal;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failure on this thread; empty after a success.
 * Valid until the next call into the library from this thread.
 */
const char *qg_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *qg_version(void);

/**
 * Releases a string returned by the library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice; null is ignored.
 */
void qg_string_free(char *s);

/**
 * Euler's constant by `method` (a `gamma` method name such as `"gosper"`
 * or `"asym-28"`) provisioned for `digits` decimals. `q == 0` and `n < 0`
 * select the method defaults.
 *
 * # Safety
 * `method` must be a NUL-terminated string; `out` must be writable.
 */
enum QgStatus qg_gamma(const char *method,
                       uint32_t digits,
                       uint64_t q,
                       int32_t n,
                       struct QgReal **out);

/**
 * `ln_q(1 + z_num/z_den)` to `digits` decimals by the accelerated route.
 *
 * # Safety
 * `out` must be writable.
 */
enum QgStatus qg_qlog(uint64_t q,
                      int64_t z_num,
                      uint64_t z_den,
                      uint32_t digits,
                      struct QgReal **out);

/**
 * `digits` decimals, truncated, all certified; fails with
 * `QG_STATUS_PRECISION` when the error bound is too wide.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_real_to_fixed(const struct QgReal *r, uint32_t digits, char **out);

/**
 * Nearest double to the midpoint.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_real_to_f64(const struct QgReal *r, double *out);

/**
 * Decimal digits after the point certified by the error bound.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_real_certified_digits(const struct QgReal *r, uint32_t *out);

/**
 * # Safety
 * `r` must come from this library and not be freed twice; null is ignored.
 */
void qg_real_free(struct QgReal *r);

/**
 * Base-2 irrationality test. `kind` is one of `eq25`, `simplified_5power`,
 * `eq26`, `eps_refined` (which reads `eps`).
 *
 * # Safety
 * `kind` must be a NUL-terminated string; `out` must be writable.
 */
enum QgStatus qg_irrat_base2(uint32_t n,
                             uint32_t m,
                             const char *kind,
                             double eps,
                             struct QgCertificate **out);

/**
 * Base-3 irrationality test at level `n`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QgStatus qg_irrat_base3(uint32_t n, struct QgCertificate **out);

/**
 * Whether the fractional part exceeded the threshold.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_certificate_passed(const struct QgCertificate *c, bool *out);

/**
 * The certificate as JSON, keys in their fixed order.
 *
 * # Safety
 * `c` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_certificate_to_json(const struct QgCertificate *c, char **out);

/**
 * # Safety
 * `c` must come from this library and not be freed twice; null is ignored.
 */
void qg_certificate_free(struct QgCertificate *c);

/**
 * Base-2 decomposition at `work_bits` bits (0 selects 200).
 *
 * # Safety
 * `out` must be writable.
 */
enum QgStatus qg_decompose_base2(uint32_t n,
                                 uint32_t m,
                                 uint32_t work_bits,
                                 struct QgDecomposition **out);

/**
 * Base-3 decomposition with `m = 6k`.
 *
 * # Safety
 * `out` must be writable.
 */
enum QgStatus qg_decompose_base3(uint32_t n,
                                 uint32_t k,
                                 uint32_t work_bits,
                                 struct QgDecomposition **out);

/**
 * Base-q decomposition.
 *
 * # Safety
 * `out` must be writable.
 */
enum QgStatus qg_decompose_baseq(uint64_t q,
                                 uint32_t n,
                                 uint32_t m,
                                 uint32_t work_bits,
                                 struct QgDecomposition **out);

/**
 * The residual `I` as a new real handle.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_decomposition_residual(const struct QgDecomposition *d, struct QgReal **out);

/**
 * The decomposition as JSON.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum QgStatus qg_decomposition_to_json(const struct QgDecomposition *d, char **out);

/**
 * # Safety
 * `d` must come from this library and not be freed twice; null is ignored.
 */
void qg_decomposition_free(struct QgDecomposition *d);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* QGAMMA_H */
