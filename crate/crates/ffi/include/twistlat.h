#ifndef TWISTLAT_H
#define TWISTLAT_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TwlStatus {
  TWL_STATUS_OK = 0,
  TWL_STATUS_NULL_POINTER = 1,
  TWL_STATUS_INVALID_ARGUMENT = 2,
  TWL_STATUS_NOT_IN_UPPER_HALF_PLANE = 3,
  TWL_STATUS_NOT_PRIMITIVE = 4,
  TWL_STATUS_INVALID_MARKOFF = 5,
  TWL_STATUS_NOT_THICK = 6,
  TWL_STATUS_NUMERIC_DEGRADATION = 7,
  TWL_STATUS_INSUFFICIENT_DATA = 8,
  TWL_STATUS_PARSE = 9,
  TWL_STATUS_IO = 10,
  TWL_STATUS_PANIC = 11,
} TwlStatus;

// Twist lattice census at a point of the upper half-plane.
typedef struct TwlCensus TwlCensus;

// Marked hyperbolic structure on the once-punctured torus.
typedef struct TwlStructure TwlStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread; valid until the next
// failing call on the same thread.
const char *twl_last_error(void);

// Library version as a static string.
const char *twl_version(void);

// Structure from Markoff traces `(x, y, z)` on `(1,0), (0,1), (1,1)` with
// thick-part bound `eps`.
//
// # Safety
// `out_h` must be a valid pointer to writable storage for a handle.
enum TwlStatus twl_structure_new(double x,
                                 double y,
                                 double z,
                                 double eps,
                                 struct TwlStructure **out_h);

// The modular torus `(3, 3, 3)`.
//
// # Safety
// `out_h` must be a valid pointer to writable storage for a handle.
enum TwlStatus twl_structure_modular(struct TwlStructure **out_h);

// # Safety
// `h` must be null or a handle from `twl_structure_new` not yet freed.
void twl_structure_free(struct TwlStructure *h);

// Geodesic length of the slope `(p, q)`.
//
// # Safety
// `h` must be a live handle and `len` writable.
enum TwlStatus twl_structure_length(const struct TwlStructure *h,
                                    int64_t p,
                                    int64_t q,
                                    double *len);

// Length of the shortest simple closed geodesic.
//
// # Safety
// `h` must be a live handle and `len` writable.
enum TwlStatus twl_structure_systole(const struct TwlStructure *h, double *len);

// Number of simple closed geodesics of length at most `len`.
//
// # Safety
// `h` must be a live handle and `count` writable.
enum TwlStatus twl_count_scc(const struct TwlStructure *h, double len, uint64_t *count);

// Number of integral multicurves of length at most `len`.
//
// # Safety
// `h` must be a live handle and `count` writable.
enum TwlStatus twl_count_multicurves(const struct TwlStructure *h, double len, uint64_t *count);

// Length of `τ = (tp, tq)` after the twist `T_α^power`, `α = (ap, aq)`.
//
// # Safety
// `h` must be a live handle and `len` writable.
enum TwlStatus twl_twisted_length(const struct TwlStructure *h,
                                  int64_t ap,
                                  int64_t aq,
                                  int64_t power,
                                  int64_t tp,
                                  int64_t tq,
                                  double *len);

// Geometric intersection number of two slopes.
//
// # Safety
// `n` must be writable.
enum TwlStatus twl_intersection_number(int64_t p1, int64_t q1, int64_t p2, int64_t q2, uint64_t *n);

// Exact-model census at `re + im·i` over `n` ascending radii.
//
// # Safety
// `radii` must point to `n` readable values and `out_h` must be writable.
enum TwlStatus twl_census_new(double re,
                              double im,
                              const double *radii,
                              uintptr_t n,
                              struct TwlCensus **out_h);

// # Safety
// `h` must be null or a handle from `twl_census_new` not yet freed.
void twl_census_free(struct TwlCensus *h);

// Number of radii in the census; 0 for a null handle.
//
// # Safety
// `h` must be null or a live handle.
uintptr_t twl_census_len(const struct TwlCensus *h);

// Row `i`: radius, unit-twist count and all-powers count.
//
// # Safety
// `h` must be a live handle and the three out-pointers writable.
enum TwlStatus twl_census_row(const struct TwlCensus *h,
                              uintptr_t i,
                              double *radius,
                              uint64_t *count_d,
                              uint64_t *count_m);

// Sets `*h` to null after freeing; convenience for callers that reuse slots.
//
// # Safety
// `h` must be null or point to a handle slot.
void twl_structure_release(struct TwlStructure **h);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWISTLAT_H */
