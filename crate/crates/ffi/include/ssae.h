/* C interface for the ssae precipitation forecaster. */

#ifndef SSAE_H
#define SSAE_H

/* Generated by cbindgen from ssae-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a C ABI call. Matches the CLI exit codes: usage 1, data 2,
// numeric 3.
typedef enum SsaeStatus {
  SSAE_STATUS_OK = 0,
  SSAE_STATUS_USAGE = 1,
  SSAE_STATUS_DATA = 2,
  SSAE_STATUS_NUMERIC = 3,
} SsaeStatus;

// Opaque loaded model.
typedef struct SsaeHandle SsaeHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Last error message raised on this thread, NUL-terminated. Valid until
// the next failing call on the same thread. Never null.
const char *ssae_last_error(void);

// Library version as a static NUL-terminated string.
const char *ssae_version(void);

// Loads a checkpoint file. On success writes a fresh handle to `out` and
// returns `Ok`; on failure leaves `out` untouched.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a valid pointer.
enum SsaeStatus ssae_load(const char *path, struct SsaeHandle **out);

// Releases a handle returned by [`ssae_load`]. A null handle is a no-op.
//
// # Safety
// `handle` must be null or a pointer obtained from [`ssae_load`] that has
// not been freed yet.
void ssae_free(struct SsaeHandle *handle);

// Look-back window length in rows; 0 if `handle` is null.
//
// # Safety
// `handle` must be null or a live handle from [`ssae_load`].
size_t ssae_lookback(const struct SsaeHandle *handle);

// Forecast horizon in days; 0 if `handle` is null.
//
// # Safety
// `handle` must be null or a live handle from [`ssae_load`].
size_t ssae_horizon(const struct SsaeHandle *handle);

// Input columns per row (features plus the target's own history copy);
// 0 if `handle` is null.
//
// # Safety
// `handle` must be null or a live handle from [`ssae_load`].
size_t ssae_input_dim(const struct SsaeHandle *handle);

// Number of trainable weights; 0 if `handle` is null.
//
// # Safety
// `handle` must be null or a live handle from [`ssae_load`].
size_t ssae_param_count(const struct SsaeHandle *handle);

// Forecasts from one raw-unit input window.
//
// `values` is a row-major `rows × cols` matrix: the newest `lookback`
// rows of the series, `cols` = [`ssae_input_dim`] columns in training
// order. `out` receives [`ssae_horizon`] forecasts in millimetres;
// `out_len` is its capacity in doubles. `clamp_nonneg` ≠ 0 clamps
// negative forecasts to zero.
//
// # Safety
// `handle` must be a live handle; `values` must point to `rows * cols`
// readable doubles; `out` must point to `out_len` writable doubles.
enum SsaeStatus ssae_predict(const struct SsaeHandle *handle,
                             const double *values,
                             size_t rows,
                             size_t cols,
                             int32_t clamp_nonneg,
                             double *out,
                             size_t out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSAE_H */
