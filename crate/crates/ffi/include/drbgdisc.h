#ifndef DRBGDISC_H
#define DRBGDISC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  DRBGDISC_FORMULA_AH = 0,
  DRBGDISC_FORMULA_THEOREM1 = 1,
  DRBGDISC_FORMULA_COROLLARY1 = 2,
  DRBGDISC_FORMULA_HNWW = 3,
  DRBGDISC_FORMULA_ADVANTAGE = 4,
} DrbgdiscFormula;

typedef enum {
  DRBGDISC_STATUS_OK = 0,
  DRBGDISC_STATUS_NULL_POINTER = 1,
  DRBGDISC_STATUS_INVALID_ARGUMENT = 2,
  DRBGDISC_STATUS_ENTROPY_UNAVAILABLE = 3,
  DRBGDISC_STATUS_UNKNOWN_MECHANISM = 4,
  DRBGDISC_STATUS_SEED_LENGTH = 5,
  DRBGDISC_STATUS_RESEED_REQUIRED = 6,
  DRBGDISC_STATUS_STREAM_TOO_SHORT = 7,
  DRBGDISC_STATUS_DOMAIN = 8,
  DRBGDISC_STATUS_PARSE = 9,
  DRBGDISC_STATUS_INFEASIBLE = 10,
  DRBGDISC_STATUS_IO = 11,
  DRBGDISC_STATUS_BUFFER_TOO_SMALL = 12,
  DRBGDISC_STATUS_PANIC = 13,
} DrbgdiscStatus;

typedef enum {
  DRBGDISC_WITNESS_KIND_OPEN_DEFICIT = 0,
  DRBGDISC_WITNESS_KIND_CLOSED_EXCESS = 1,
} DrbgdiscWitnessKind;

typedef struct DrbgdiscGenerator DrbgdiscGenerator;

typedef struct DrbgdiscPoints DrbgdiscPoints;

/**
 * Scalar part of a discrepancy result. The witness corner is written to a
 * separate caller buffer of `dim` doubles.
 */
typedef struct {
  double value;
  DrbgdiscWitnessKind kind;
  size_t open_count;
  size_t closed_count;
  /**
   * False when the time budget ran out and `value` is only a lower bound.
   */
  bool certified;
  double elapsed_seconds;
  uint64_t nodes;
} DrbgdiscDiscrepancy;

typedef struct {
  uint32_t d;
  uint64_t n;
  uint32_t p;
  uint32_t b;
  double c;
  double q;
  double epsilon;
} DrbgdiscBoundQuery;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t drbgdisc_last_error(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *drbgdisc_version(void);

/**
 * Instantiate a generator. `mechanism` is `"ctr-drbg-256"` or
 * `"test-counter"`; the seed is `seed_len` bytes.
 *
 * # Safety
 * `mechanism` must be a valid C string, `seed` valid for `seed_len` bytes and
 * `out` a valid pointer.
 */
DrbgdiscStatus drbgdisc_generator_new(const char *mechanism,
                                      const uint8_t *seed,
                                      size_t seed_len,
                                      DrbgdiscGenerator **out);

/**
 * # Safety
 * `gen` must be null or a handle from [`drbgdisc_generator_new`] not yet freed.
 */
void drbgdisc_generator_free(DrbgdiscGenerator *gen);

/**
 * Next `bits` bits of the stream, packed MSB first into `buf`
 * (`ceil(bits/8)` bytes; trailing bits of the last byte are zero).
 *
 * # Safety
 * `gen` must be a live handle and `buf` valid for `len` bytes.
 */
DrbgdiscStatus drbgdisc_generator_fill(DrbgdiscGenerator *gen,
                                       uint64_t bits,
                                       uint8_t *buf,
                                       size_t len);

/**
 * Draw `n` points in `[0,1)^d` with `p`-bit coordinates from the generator.
 *
 * # Safety
 * `gen` must be a live handle and `out` a valid pointer.
 */
DrbgdiscStatus drbgdisc_points_generate(DrbgdiscGenerator *gen,
                                        size_t d,
                                        size_t n,
                                        uint32_t p,
                                        DrbgdiscPoints **out);

/**
 * Point set from `n*d` row-major values in `[0,1)`, rounded down to `p` bits.
 *
 * # Safety
 * `values` must be valid for `n*d` doubles and `out` a valid pointer.
 */
DrbgdiscStatus drbgdisc_points_from_values(const double *values,
                                           size_t d,
                                           size_t n,
                                           uint32_t p,
                                           DrbgdiscPoints **out);

/**
 * # Safety
 * `path` must be a valid C string and `out` a valid pointer.
 */
DrbgdiscStatus drbgdisc_points_load(const char *path, DrbgdiscPoints **out);

/**
 * # Safety
 * `points` must be a live handle and `path` a valid C string.
 */
DrbgdiscStatus drbgdisc_points_save(const DrbgdiscPoints *points, const char *path);

/**
 * # Safety
 * `points` must be null or a live handle.
 */
void drbgdisc_points_free(DrbgdiscPoints *points);

/**
 * Dimension of the set, 0 for a null handle.
 *
 * # Safety
 * `points` must be null or a live handle.
 */
size_t drbgdisc_points_dim(const DrbgdiscPoints *points);

/**
 * Number of points, 0 for a null handle.
 *
 * # Safety
 * `points` must be null or a live handle.
 */
size_t drbgdisc_points_len(const DrbgdiscPoints *points);

/**
 * Copy the coordinates, row-major, into `buf` of `len` doubles.
 *
 * # Safety
 * `points` must be a live handle and `buf` valid for `len` doubles.
 */
DrbgdiscStatus drbgdisc_points_values(const DrbgdiscPoints *points, double *buf, size_t len);

/**
 * Exact star discrepancy. `budget_seconds <= 0` means no time limit. The
 * witness corner goes to `witness` (may be null) of `witness_len` doubles.
 *
 * # Safety
 * `points` must be a live handle, `out` valid, `witness` null or valid for
 * `witness_len` doubles.
 */
DrbgdiscStatus drbgdisc_star_discrepancy(const DrbgdiscPoints *points,
                                         double budget_seconds,
                                         double *witness,
                                         size_t witness_len,
                                         DrbgdiscDiscrepancy *out);

/**
 * Brute-force evaluation over the whole critical grid; refuses large inputs
 * with [`DrbgdiscStatus::Infeasible`].
 *
 * # Safety
 * As for [`drbgdisc_star_discrepancy`].
 */
DrbgdiscStatus drbgdisc_star_discrepancy_oracle(const DrbgdiscPoints *points,
                                                double *witness,
                                                size_t witness_len,
                                                DrbgdiscDiscrepancy *out);

/**
 * Fills `query` with the library defaults.
 *
 * # Safety
 * `query` must be a valid pointer.
 */
DrbgdiscStatus drbgdisc_bound_query_default(DrbgdiscBoundQuery *query);

/**
 * Headline value of one of the closed-form bounds. Sets `*vacuous` (if
 * non-null) when the bound says nothing.
 *
 * # Safety
 * `query` and `out` must be valid pointers; `vacuous` may be null.
 */
DrbgdiscStatus drbgdisc_bound(DrbgdiscFormula formula,
                              const DrbgdiscBoundQuery *query,
                              double *out,
                              bool *vacuous);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DRBGDISC_H */
