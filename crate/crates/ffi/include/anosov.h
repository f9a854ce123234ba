#ifndef ANOSOV_H
#define ANOSOV_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every function.
 */
typedef enum AnosovStatus {
  ANOSOV_STATUS_OK = 0,
  ANOSOV_STATUS_NULL_POINTER = 1,
  ANOSOV_STATUS_INVALID_UTF8 = 2,
  ANOSOV_STATUS_INVALID_JSON = 3,
  ANOSOV_STATUS_INVALID_INPUT = 4,
  ANOSOV_STATUS_NUMERIC = 5,
  ANOSOV_STATUS_BUFFER_TOO_SMALL = 6,
  /**
   * The computation ran and its certificate failed.
   */
  ANOSOV_STATUS_CERTIFICATE_FAILED = 7,
  ANOSOV_STATUS_PANIC = 8,
} AnosovStatus;

/**
 * Opaque representation handle.
 */
typedef struct AnosovRep AnosovRep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a representation document. On success `*out` owns a handle to release with [`anosov_rep_free`].
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum AnosovStatus anosov_rep_from_json(const char *json,
                                       struct AnosovRep **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `rep` must come from this library and not be used afterwards.
 */
void anosov_rep_free(struct AnosovRep *rep);

/**
 * Matrix dimension of the representation.
 *
 * # Safety
 * `rep` must be a live handle; `out_dim` must be valid for writes.
 */
enum AnosovStatus anosov_rep_dim(const struct AnosovRep *rep, size_t *out_dim);

/**
 * Serializes the representation.
 *
 * # Safety
 * `rep` must be a live handle; `out_json` must be valid for writes.
 */
enum AnosovStatus anosov_rep_to_json(const struct AnosovRep *rep, char **out_json);

/**
 * Evaluates a word (generator labels separated by spaces, `^-1` for inverses) into
 * row-major buffers of length `dim * dim`. `out_im` may be null.
 *
 * # Safety
 * `rep` must be a live handle, `word` NUL-terminated, and the buffers valid for `len` writes.
 */
enum AnosovStatus anosov_rep_evaluate(const struct AnosovRep *rep,
                                      const char *word,
                                      double *out_re,
                                      double *out_im,
                                      size_t len);

/**
 * Singular values (nonincreasing) of an `n x n` row-major matrix; `im` may be null for real input.
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `n * n` values; `out` must be valid for `n` writes.
 */
enum AnosovStatus anosov_svd_sigmas(const double *re, const double *im, size_t n, double *out);

/**
 * Index-set estimate on the ball of radius `radius` as JSON. `thresholds_json` may be null.
 *
 * # Safety
 * `rep` must be a live handle; strings NUL-terminated; `out_json` valid for writes.
 */
enum AnosovStatus anosov_index_set_json(const struct AnosovRep *rep,
                                        size_t radius,
                                        const char *thresholds_json,
                                        char **out_json);

/**
 * Growth fit of `sigma_1 / sigma_d` on the ball as JSON. `thresholds_json` may be null.
 *
 * # Safety
 * As [`anosov_index_set_json`].
 */
enum AnosovStatus anosov_qie_report_json(const struct AnosovRep *rep,
                                         size_t radius,
                                         const char *thresholds_json,
                                         char **out_json);

/**
 * Ping-pong certificate for a configuration document. Returns `CertificateFailed`
 * (with the certificate still written) when the check fails.
 *
 * # Safety
 * `config_json` NUL-terminated; `out_json` valid for writes.
 */
enum AnosovStatus anosov_certify_pingpong_json(const char *config_json, char **out_json);

/**
 * Builds a representation from a JSON spec:
 * `{"kind":"rho"|"psi","rep":{..},"p":2,"r":0}`, `{"kind":"phi","rho":{..},"psi":{..},"conjugators":[..],"anchors":[..]}`
 * or `{"kind":"sp21","b":1.0}`. The result is a representation document.
 *
 * # Safety
 * `spec_json` NUL-terminated; `out_json` valid for writes.
 */
enum AnosovStatus anosov_build_json(const char *spec_json,
                                    char **out_json);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void anosov_string_free(char *s);

/**
 * Copy of the calling thread's last error message, or null. Release with [`anosov_string_free`].
 */
char *anosov_last_error_message(void);

/**
 * Library version (static string).
 */
const char *anosov_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANOSOV_H */
