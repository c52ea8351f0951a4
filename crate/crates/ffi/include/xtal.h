/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef XTAL_H
#define XTAL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `XTAL_STATUS_INPUT` and `XTAL_STATUS_NUMERICAL` match the
 * command-line exit codes 2 and 3.
 */
typedef enum XtalStatus {
  XTAL_STATUS_OK = 0,
  XTAL_STATUS_NULL_POINTER = 1,
  XTAL_STATUS_INPUT = 2,
  XTAL_STATUS_NUMERICAL = 3,
  XTAL_STATUS_BUFFER_TOO_SMALL = 4,
  XTAL_STATUS_UTF8 = 5,
  XTAL_STATUS_PANIC = 6,
} XtalStatus;

/**
 * A crystal with its standard realization and force constants.
 */
typedef struct XtalCrystal XtalCrystal;

/**
 * A full-rank lattice in R^n.
 */
typedef struct XtalLattice XtalLattice;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *xtal_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *xtal_version(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void xtal_string_free(char *s);

/**
 * Parses a crystal description (JSON) and computes its realization.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum XtalStatus xtal_crystal_from_json(const char *json, struct XtalCrystal **out);

/**
 * Loads a bundled crystal: "square", "honeycomb", "diamond" or "chain".
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum XtalStatus xtal_crystal_bundled(const char *name, struct XtalCrystal **out);

/**
 * # Safety
 * `crystal` must come from this library and not have been freed. NULL is
 * ignored.
 */
void xtal_crystal_free(struct XtalCrystal *crystal);

/**
 * Lattice dimension n, or 0 for NULL.
 *
 * # Safety
 * `crystal` must be NULL or a live handle.
 */
uintptr_t xtal_crystal_dim(const struct XtalCrystal *crystal);

/**
 * Number of Bloch bands n |V|, or 0 for NULL.
 *
 * # Safety
 * `crystal` must be NULL or a live handle.
 */
uintptr_t xtal_crystal_band_count(const struct XtalCrystal *crystal);

/**
 * # Safety
 * `crystal` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_crystal_ortho_constant(const struct XtalCrystal *crystal, double *out);

/**
 * Realization as JSON.
 *
 * # Safety
 * `crystal` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_crystal_realization_json(const struct XtalCrystal *crystal, char **out);

/**
 * Squared acoustic speeds s_i(chi)^2, ascending, into `out[0..n]`.
 *
 * # Safety
 * `chi` must point to `chi_len` doubles and `out` to `out_len` doubles.
 */
enum XtalStatus xtal_acoustic_speeds(const struct XtalCrystal *crystal,
                                     const double *chi,
                                     uintptr_t chi_len,
                                     double *out,
                                     uintptr_t out_len);

/**
 * Eigenvalues of the dynamical matrix at chi, ascending, into
 * `out[0..n |V|]`.
 *
 * # Safety
 * `chi` must point to `chi_len` doubles and `out` to `out_len` doubles.
 */
enum XtalStatus xtal_dispersion(const struct XtalCrystal *crystal,
                                const double *chi,
                                uintptr_t chi_len,
                                double *out,
                                uintptr_t out_len);

/**
 * Integrated acoustic spectrum over geodesics with |lambda| <= cutoff, as
 * JSON. Nonzero `primitive` restricts to primitive geodesics.
 *
 * # Safety
 * `crystal` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_asp_json(const struct XtalCrystal *crystal,
                              double cutoff,
                              int primitive,
                              char **out);

/**
 * Period lattice of the crystal's realization.
 *
 * # Safety
 * `crystal` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_crystal_period_lattice(const struct XtalCrystal *crystal,
                                            struct XtalLattice **out);

/**
 * Lattice spanned by `dim` generators of length `dim`, stored one after
 * another in `generators`.
 *
 * # Safety
 * `generators` must point to `dim * dim` doubles and `out` be valid.
 */
enum XtalStatus xtal_lattice_new(const double *generators, uintptr_t dim, struct XtalLattice **out);

/**
 * # Safety
 * `lattice` must come from this library and not have been freed. NULL is
 * ignored.
 */
void xtal_lattice_free(struct XtalLattice *lattice);

/**
 * Dimension, or 0 for NULL.
 *
 * # Safety
 * `lattice` must be NULL or a live handle.
 */
uintptr_t xtal_lattice_dim(const struct XtalLattice *lattice);

/**
 * Dual lattice L* = { y : y . x in Z for all x in L } as a new handle.
 *
 * # Safety
 * `lattice` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_lattice_dual(const struct XtalLattice *lattice, struct XtalLattice **out);

/**
 * Covolume |det B|.
 *
 * # Safety
 * `lattice` must be a live handle and `out` a valid pointer.
 */
enum XtalStatus xtal_lattice_volume(const struct XtalLattice *lattice, double *out);

/**
 * Evaluates both sides of the theta-function Poisson identity at `t`.
 * Any of the output pointers may be NULL.
 *
 * # Safety
 * `lattice` must be a live handle; non-NULL outputs must be valid.
 */
enum XtalStatus xtal_theta_check(const struct XtalLattice *lattice,
                                 double t,
                                 double tail,
                                 double *lhs,
                                 double *rhs,
                                 double *relative_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* XTAL_H */
