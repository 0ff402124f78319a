#ifndef FROBTRACE_H
#define FROBTRACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FtStatus {
  FT_STATUS_OK = 0,
  FT_STATUS_NULL_POINTER = 1,
  FT_STATUS_INVALID_UTF8 = 2,
  FT_STATUS_INVALID_FIELD = 3,
  FT_STATUS_INVALID_INPUT = 4,
  /**
   * The computation ran but its certificate or check failed.
   */
  FT_STATUS_CHECK_FAILED = 5,
  FT_STATUS_PANIC = 6,
} FtStatus;

/**
 * Opaque finite field handle.
 */
typedef struct FtField FtField;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates `F_{p^s}`. With `s == 1` the modulus may be `NULL`; otherwise
 * `modulus` holds the `s + 1` coefficients of a monic irreducible
 * polynomial, lowest degree first.
 *
 * # Safety
 * `modulus` must point to `modulus_len` integers or be `NULL`; `out` must
 * be a valid pointer.
 */
enum FtStatus ft_field_new(uint64_t p,
                           size_t s,
                           const int64_t *modulus,
                           size_t modulus_len,
                           struct FtField **out);

/**
 * # Safety
 * `field` must come from [`ft_field_new`] and not be used afterwards.
 */
void ft_field_free(struct FtField *field);

/**
 * The characteristic, or 0 for a `NULL` handle.
 *
 * # Safety
 * `field` must be a live handle or `NULL`.
 */
uint32_t ft_field_characteristic(const struct FtField *field);

/**
 * The extension degree `s`, or 0 for a `NULL` handle.
 *
 * # Safety
 * `field` must be a live handle or `NULL`.
 */
size_t ft_field_degree(const struct FtField *field);

/**
 * Trace `Tr^e` of a top form, e.g. `"(x/(x^3+1)) dx"`. JSON: `{version, num, den, e}`.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
 */
enum FtStatus ft_trace(const struct FtField *field,
                       const char *vars,
                       const char *form,
                       uint32_t e,
                       char **out_json);

/**
 * Matrix of `Tr^e: H^0(omega(E + p^e D)) -> H^0(omega(E + D))` on `P^n`,
 * with divisors written as `poly:mult,...,H:k`.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
 */
enum FtStatus ft_trace_matrix(const struct FtField *field,
                              const char *vars,
                              const char *chart,
                              const char *e_divisor,
                              const char *d_divisor,
                              uint32_t e,
                              char **out_json);

/**
 * Basis of `H^0(P^n, omega(D))` on the chart.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
 */
enum FtStatus ft_sections(const struct FtField *field,
                          const char *vars,
                          const char *chart,
                          const char *divisor,
                          char **out_json);

/**
 * Fedder's criterion for the cone over `V(f)`. Returns
 * [`FtStatus::CheckFailed`] (with the report still written) if the
 * certificate does not verify.
 *
 * # Safety
 * Pointers must be valid NUL-terminated strings (or `NULL` where allowed).
 */
enum FtStatus ft_fedder(const struct FtField *field,
                        const char *vars,
                        const char *f,
                        char **out_json);

/**
 * The Fermat cubic report of `frobtrace demo fermat-cubic`.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum FtStatus ft_demo_fermat_cubic(char **out_json);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void ft_string_free(char *s);

/**
 * Message for the last failed call on this thread, or `NULL`. Valid until
 * the next call into the library from the same thread.
 */
const char *ft_last_error(void);

/**
 * JSON schema version of the reports.
 */
const char *ft_schema_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FROBTRACE_H */
