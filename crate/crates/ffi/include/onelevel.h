#ifndef ONELEVEL_H
#define ONELEVEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OlStatus {
  OL_STATUS_OK = 0,
  OL_STATUS_NULL_POINTER = 1,
  OL_STATUS_INVALID_ARGUMENT = 2,
  OL_STATUS_UNSUPPORTED_GROUP = 3,
  OL_STATUS_SIGMA_OUT_OF_RANGE = 4,
  OL_STATUS_NUMERICAL = 5,
  OL_STATUS_MISMATCH = 6,
  OL_STATUS_PANIC = 7,
} OlStatus;

/**
 * Values accepted wherever a function takes `int32_t group`.
 */
typedef enum OlGroup {
  OL_GROUP_SO_EVEN = 0,
  OL_GROUP_SO_ODD = 1,
  OL_GROUP_SP = 2,
  OL_GROUP_O = 3,
  OL_GROUP_U = 4,
} OlGroup;

/**
 * Closed-form optimal `g` for one group and support.
 */
typedef struct OlOptimalG OlOptimalG;

/**
 * Nystrom solution sampled at its nodes.
 */
typedef struct OlSampled OlSampled;

typedef struct OlCoefficients {
  double c1;
  double c2;
  double c3;
  double lambda;
} OlCoefficients;

typedef struct OlBoundReport {
  int32_t group;
  double sigma;
  double optimal_bound;
  double corollary_bound;
  double naive_bound;
  double fourier_side_bound;
  double criterion_residual;
  double oracle_discrepancy;
  size_t grid_size;
  size_t nystrom_nodes;
} OlBoundReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread; empty after a
 * success. Valid until the next call into this library on the thread.
 */
const char *ol_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ol_version(void);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum OlStatus ol_optimal_build(int32_t group, double sigma, struct OlOptimalG **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writing.
 */
enum OlStatus ol_optimal_from_json(const char *json, struct OlOptimalG **out);

/**
 * # Safety
 * `handle` must come from this library and not be freed twice. Null is a no-op.
 */
void ol_optimal_free(struct OlOptimalG *handle);

/**
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_optimal_eval(const struct OlOptimalG *handle, double x, double *out);

/**
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_optimal_coefficients(const struct OlOptimalG *handle, struct OlCoefficients *out);

/**
 * Max `|(I + K) g - 1|` over `grid_size` points.
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_optimal_verify(const struct OlOptimalG *handle, size_t grid_size, double *out);

/**
 * JSON rendering; release the string with [`ol_string_free`].
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_optimal_to_json(const struct OlOptimalG *handle, char **out);

/**
 * # Safety
 * `s` must come from this library and not be freed twice. Null is a no-op.
 */
void ol_string_free(char *s);

/**
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_infimum_bound(const struct OlOptimalG *handle, double *out);

/**
 * # Safety
 * `out` must be valid for writing.
 */
enum OlStatus ol_corollary_bound(int32_t group, double sigma, double *out);

/**
 * # Safety
 * `out` must be valid for writing.
 */
enum OlStatus ol_naive_bound(int32_t group, double sigma, double *out);

/**
 * Bound from `phi^ = g * g` against the density of `group`, which may
 * differ from the group `handle` was built for.
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_fourier_side_bound(int32_t group, const struct OlOptimalG *handle, double *out);

/**
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_phi_value(const struct OlOptimalG *handle, double x, double *out);

/**
 * # Safety
 * `out` must be valid for writing a pointer.
 */
enum OlStatus ol_nystrom_solve(int32_t group,
                               double sigma,
                               size_t node_count,
                               struct OlSampled **out);

/**
 * # Safety
 * `handle` must come from this library and not be freed twice. Null is a no-op.
 */
void ol_sampled_free(struct OlSampled *handle);

/**
 * Number of nodes in a Nystrom solution.
 *
 * # Safety
 * `handle` must be a live handle and `out` valid for writing.
 */
enum OlStatus ol_sampled_len(const struct OlSampled *handle, size_t *out);

/**
 * Copies nodes and values into caller buffers of length `len`, which must
 * equal [`ol_sampled_len`]. Either buffer may be null to skip it.
 *
 * # Safety
 * Non-null buffers must be valid for `len` writes.
 */
enum OlStatus ol_sampled_copy(const struct OlSampled *handle,
                              double *nodes,
                              double *values,
                              size_t len);

/**
 * # Safety
 * Both handles must be live and `out` valid for writing.
 */
enum OlStatus ol_oracle_discrepancy(const struct OlOptimalG *og,
                                    const struct OlSampled *sampled,
                                    double *out);

/**
 * Builds, verifies and solves for one `(group, sigma)` and fills `out`.
 *
 * # Safety
 * `out` must be valid for writing.
 */
enum OlStatus ol_make_report(int32_t group,
                             double sigma,
                             size_t grid_size,
                             size_t nystrom_nodes,
                             struct OlBoundReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ONELEVEL_H */
