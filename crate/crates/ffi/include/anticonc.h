#ifndef ANTICONC_H
#define ANTICONC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum AcStatus {
  AC_STATUS_OK = 0,
  AC_STATUS_NULL_POINTER = 1,
  AC_STATUS_INVALID_UTF8 = 2,
  AC_STATUS_PARSE_ERROR = 3,
  AC_STATUS_INVALID_ARGUMENT = 4,
  AC_STATUS_NUMERICAL_ERROR = 5,
  AC_STATUS_BUFFER_TOO_SMALL = 6,
  AC_STATUS_PANIC = 7,
} AcStatus;

// Opaque orthogonal-polynomial system handle.
typedef struct AcOrthoSystem AcOrthoSystem;

// Opaque polynomial handle.
typedef struct AcPolynomial AcPolynomial;

// A Monte Carlo estimate.
typedef struct AcEstimate {
  double value;
  // Standard error (named to avoid the C `stderr` macro).
  double std_error;
  uint64_t samples;
  uint64_t seed;
} AcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failure on this thread, or `NULL`. The pointer stays
// valid until the next call into this library from the same thread.
const char *ac_last_error(void);

// Library version as a static NUL-terminated string.
const char *ac_version(void);

// Parses `expr` over variables `x1..xn`.
//
// # Safety
// `expr` must be NUL-terminated; `out` must be writable.
enum AcStatus ac_poly_parse(const char *expr, size_t n, struct AcPolynomial **out);

// # Safety
// `p` must come from [`ac_poly_parse`] and not have been freed.
void ac_poly_free(struct AcPolynomial *p);

// Number of variables.
//
// # Safety
// `p` must be a live handle; `out` writable.
enum AcStatus ac_poly_dim(const struct AcPolynomial *p, size_t *out);

// Total degree, or `-1` for the zero polynomial.
//
// # Safety
// `p` must be a live handle; `out` writable.
enum AcStatus ac_poly_degree(const struct AcPolynomial *p, int32_t *out);

// Evaluates at `x[0..len]`; `len` must equal the dimension.
//
// # Safety
// `x` must point to `len` doubles; `out` writable.
enum AcStatus ac_poly_evaluate(const struct AcPolynomial *p,
                               const double *x,
                               size_t len,
                               double *out);

// `coeff_d(f)`: Euclidean norm of the degree-`d` coefficients.
//
// # Safety
// `p` must be a live handle; `out` writable.
enum AcStatus ac_poly_coeff_level(const struct AcPolynomial *p, uint32_t d, double *out);

// Canonical text form; release with [`ac_string_free`]. `NULL` on failure.
//
// # Safety
// `p` must be a live handle or `NULL`.
char *ac_poly_to_string(const struct AcPolynomial *p);

// # Safety
// `s` must come from this library and not have been freed.
void ac_string_free(char *s);

// Orthonormal polynomials up to `maxdeg` for a measure such as
// `"uniform"`, `"gaussian"`, `"laplace:iso"` or `"pexp:1.5:iso"`.
//
// # Safety
// `measure` must be NUL-terminated; `out` writable.
enum AcStatus ac_ortho_new(const char *measure, size_t maxdeg, struct AcOrthoSystem **out);

// # Safety
// `s` must come from [`ac_ortho_new`] and not have been freed.
void ac_ortho_free(struct AcOrthoSystem *s);

// # Safety
// `s` must be a live handle; `out` writable.
enum AcStatus ac_ortho_maxdeg(const struct AcOrthoSystem *s, size_t *out);

// `c_{μ,d} = ⟨p_d, x^d⟩`.
//
// # Safety
// `s` must be a live handle; `out` writable.
enum AcStatus ac_ortho_constant(const struct AcOrthoSystem *s, size_t d, double *out);

// Closed-form levels `η_i` and multiplicities for the isotropic Euclidean
// ball, indexed by `i = 0..=d/2` (level `i` belongs to harmonics of degree
// `d - 2i`). `*len_out` receives the level count even when the buffers are too
// small.
//
// # Safety
// `eta` and `mult` must hold `cap` entries; `len_out` writable.
enum AcStatus ac_ball_spectrum_theoretical(size_t n,
                                           uint32_t d,
                                           double *eta,
                                           uint64_t *mult,
                                           size_t cap,
                                           size_t *len_out);

// Ascending eigenvalues of `C̃` for the isotropic Euclidean ball, computed
// from the exact covariance matrix.
//
// # Safety
// `values` must hold `cap` doubles; `len_out` writable.
enum AcStatus ac_ball_spectrum_empirical(size_t n,
                                         uint32_t d,
                                         double *values,
                                         size_t cap,
                                         size_t *len_out);

// `z_{p,n}`, the radius making the uniform `L_p` ball isotropic.
//
// # Safety
// `out` writable.
enum AcStatus ac_ball_isotropic_scale(size_t n, double p, double *out);

// `E‖Z‖_p^k = Γ((n+k)/p)/Γ(n/p)`.
//
// # Safety
// `out` writable.
enum AcStatus ac_gamma_ratio_moment(size_t n, double p, double k, double *out);

// `Var(n^{-1/2}‖X‖_p^p)` on the isotropic `L_p` ball for even `p`.
//
// # Safety
// `out` writable.
enum AcStatus ac_norm_power_variance(size_t n, uint32_t p, double *out);

// Monte Carlo variance of `f(X)` where `X` follows `measure` in dimension
// `dim(f)`: a base measure name (product of copies) or `"ball:<p>"`.
//
// # Safety
// `p` must be a live handle, `measure` NUL-terminated, `out` writable.
enum AcStatus ac_variance_mc(const struct AcPolynomial *p,
                             const char *measure,
                             size_t samples,
                             uint64_t seed,
                             struct AcEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANTICONC_H */
