#ifndef CHIRAL_CAPI_H
#define CHIRAL_CAPI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CcStatus {
  CC_STATUS_OK = 0,
  CC_STATUS_DOMAIN = 1,
  CC_STATUS_CONVERGENCE = 2,
  CC_STATUS_IO = 3,
  CC_STATUS_VERIFICATION = 4,
  CC_STATUS_NULL_POINTER = 5,
  CC_STATUS_BUFFER_TOO_SMALL = 6,
  CC_STATUS_OUT_OF_RANGE = 7,
  CC_STATUS_PANIC = 8,
} CcStatus;

typedef struct CcModel CcModel;

typedef struct CcSpectrum CcSpectrum;

typedef struct CcThermo CcThermo;

typedef struct CcComplex {
  double re;
  double im;
} CcComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *cc_version(void);

/**
 * Copies the calling thread's last error message into `buf` (truncated, NUL-terminated) and
 * returns the full length including the terminator; 0 when there is no message.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t cc_last_error(char *buf, size_t len);

/**
 * Creates a chain of 2 * `half_size` sites.
 *
 * # Safety
 * `out` must be a valid pointer; the handle is released with `cc_model_free`.
 */
enum CcStatus cc_model_new(size_t half_size,
                           struct CcComplex a,
                           struct CcComplex eta,
                           struct CcModel **out);

/**
 * # Safety
 * `m` must be null or a handle from `cc_model_new` not yet freed.
 */
void cc_model_free(struct CcModel *m);

/**
 * Number of sites, 0 for a null handle.
 *
 * # Safety
 * `m` must be null or a live model handle.
 */
size_t cc_model_sites(const struct CcModel *m);

/**
 * Runs the identity suite. `failed` receives the number of failing checks; the status is
 * `CC_STATUS_VERIFICATION` when it is nonzero.
 *
 * # Safety
 * `m` must be a live model handle and `failed` a valid pointer.
 */
enum CcStatus cc_model_verify(const struct CcModel *m, uint64_t seed, size_t *failed);

/**
 * Diagonalizes the model.
 *
 * # Safety
 * `m` must be a live model handle and `out` a valid pointer; release with `cc_spectrum_free`.
 */
enum CcStatus cc_spectrum_new(const struct CcModel *m, uint64_t seed, struct CcSpectrum **out);

/**
 * # Safety
 * `s` must be null or a handle from `cc_spectrum_new` not yet freed.
 */
void cc_spectrum_free(struct CcSpectrum *s);

/**
 * Number of states, 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live spectrum handle.
 */
size_t cc_spectrum_state_count(const struct CcSpectrum *s);

/**
 * Energy of every state, indexed by state.
 *
 * # Safety
 * `s` must be a live spectrum handle and `out` point to `len` writable doubles.
 */
enum CcStatus cc_spectrum_energies(const struct CcSpectrum *s, double *out, size_t len);

/**
 * Zero roots of one state's transfer eigenvalue: `z` receives sites - 1 values, `w` sites
 * values, and `lambda0_sq` the constant of the quadratic factor.
 *
 * # Safety
 * `s` must be a live spectrum handle; `z` and `w` must hold `z_len` and `w_len` entries.
 */
enum CcStatus cc_spectrum_roots(const struct CcSpectrum *s,
                                size_t state,
                                struct CcComplex *z,
                                size_t z_len,
                                struct CcComplex *w,
                                size_t w_len,
                                struct CcComplex *lambda0_sq);

/**
 * Refines the state's roots against the Bethe equations and reports the energy, momentum and
 * final residual computed from the solution.
 *
 * # Safety
 * `s` must be a live spectrum handle and the outputs valid pointers.
 */
enum CcStatus cc_spectrum_solve_bae(const struct CcSpectrum *s,
                                    size_t state,
                                    double *energy,
                                    double *momentum,
                                    double *residual);

/**
 * Thermodynamic limit at real `a` and anisotropy `gamma`; `tol` <= 0 selects the default.
 *
 * # Safety
 * `out` must be a valid pointer; release with `cc_thermo_free`.
 */
enum CcStatus cc_thermo_new(double a, double gamma, double tol, struct CcThermo **out);

/**
 * # Safety
 * `t` must be null or a handle from `cc_thermo_new` not yet freed.
 */
void cc_thermo_free(struct CcThermo *t);

/**
 * Ground-state energy per site.
 *
 * # Safety
 * `t` must be a live thermo handle and `out` a valid pointer.
 */
enum CcStatus cc_thermo_ground_energy(const struct CcThermo *t, double *out);

/**
 * One point of an excitation branch: `kind` is 1, 2 or 3, `n` the string length for kind 3.
 *
 * # Safety
 * `t` must be a live thermo handle and the outputs valid pointers.
 */
enum CcStatus cc_thermo_excitation(const struct CcThermo *t,
                                   uint32_t kind,
                                   size_t n,
                                   double lambda,
                                   double *delta_e,
                                   double *k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHIRAL_CAPI_H */
