#ifndef CHAINRING_H
#define CHAINRING_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum {
  CHAINRING_STATUS_OK = 0,
  CHAINRING_STATUS_INVALID_PARAMETER = 1,
  CHAINRING_STATUS_BUDGET_EXCEEDED = 2,
  CHAINRING_STATUS_NON_CONVERGENT = 3,
  CHAINRING_STATUS_IDENTITY_VIOLATION = 4,
  CHAINRING_STATUS_NULL_POINTER = 5,
  CHAINRING_STATUS_PANIC = 6,
} ChainringStatus;

/*
 Opaque handle for a finite chain ring with residue field size `q` and
 nilpotency index `s`.
 */
typedef struct ChainringRing ChainringRing;

/*
 Limit density of free submodules with its Andrews-Gordon bounds; each
 `*_error` is a certified absolute error.
 */
typedef struct {
  double lower;
  double lower_error;
  double value;
  double value_error;
  double upper;
  double upper_error;
} ChainringDensity;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Creates a ring handle; `q` must be a prime power and `s >= 1`.

 # Safety
 `out` must be null or valid for writes.
 */
ChainringStatus chainring_ring_new(uint64_t q, uint32_t s, ChainringRing **out);

/*
 Releases a ring handle; null is ignored.

 # Safety
 `ring` must be null or a handle from [`chainring_ring_new`] that has not
 been freed.
 */
void chainring_ring_free(ChainringRing *ring);

/*
 Releases a string returned by this library; null is ignored.

 # Safety
 `s` must be null or a string returned by this library that has not been
 freed.
 */
void chainring_string_free(char *s);

/*
 Message of the last failed call on this thread, or null. Valid until the
 next call into the library on the same thread.
 */
const char *chainring_last_error(void);

/*
 Library version as a static string.
 */
const char *chainring_version(void);

/*
 Number of submodules of `R^n` of type `(counts[0], …, counts[len-1])`,
 where `len` must equal `s`, written as a decimal string.

 # Safety
 `ring` must be null or a live handle, `counts` must point to `len`
 readable values (or be null when `len` is 0), and `out` must be null or
 valid for writes.
 */
ChainringStatus chainring_count_by_type(const ChainringRing *ring,
                                        uint64_t n,
                                        const uint64_t *counts,
                                        uintptr_t len,
                                        char **out);

/*
 Number of free submodules of rank `rank` in `R^n`, as a decimal string.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_count_free(const ChainringRing *ring,
                                     uint64_t n,
                                     uint64_t rank,
                                     char **out);

/*
 Number of submodules of length `ell` in `R^n`, as a decimal string.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_count_by_length(const ChainringRing *ring,
                                          uint64_t n,
                                          uint64_t ell,
                                          char **out);

/*
 Fraction of free submodules among submodules of length `ell` in `R^n`.
 `exact` (optional) receives the fraction as `"num/den"`.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_prob_free_given_length(const ChainringRing *ring,
                                                 uint64_t n,
                                                 uint64_t ell,
                                                 double *value,
                                                 char **exact);

/*
 Fraction of free submodules among submodules of rank `rank` in `R^n`.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_prob_free_given_rank(const ChainringRing *ring,
                                               uint64_t n,
                                               uint64_t rank,
                                               double *value,
                                               char **exact);

/*
 Probability that a uniform `k × n` matrix over the ring is rectangular
 unimodular.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_prob_unimodular(const ChainringRing *ring,
                                          uint64_t k,
                                          uint64_t n,
                                          double *value,
                                          char **exact);

/*
 Limit density of free submodules at fixed relative length, with its
 certified absolute error.

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_limit_density(const ChainringRing *ring, double *value, double *error);

/*
 Limit density with its lower and upper bounds (requires `s >= 2`).

 # Safety
 `ring` must be null or a live handle from [`chainring_ring_new`], and every
 out-parameter must be null or valid for writes.
 */
ChainringStatus chainring_density_bounds(const ChainringRing *ring, ChainringDensity *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CHAINRING_H */
