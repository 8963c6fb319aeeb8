#ifndef TUBECENTER_H
#define TUBECENTER_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TcStatus {
  TC_STATUS_OK = 0,
  TC_STATUS_NULL_POINTER = 1,
  TC_STATUS_INVALID_UTF8 = 2,
  TC_STATUS_PARSE_ERROR = 3,
  TC_STATUS_SCHEMA_ERROR = 4,
  TC_STATUS_IO_ERROR = 5,
  /**
   * Input data failed validation.
   */
  TC_STATUS_VALIDATION_FAILED = 6,
  /**
   * A numerical step of the pipeline failed.
   */
  TC_STATUS_NUMERICAL_ERROR = 7,
  TC_STATUS_NO_MATCHING = 8,
  TC_STATUS_OUT_OF_RANGE = 9,
  TC_STATUS_INVALID_ARGUMENT = 10,
  TC_STATUS_PANIC = 11,
} TcStatus;

/**
 * A fusion category.
 */
typedef struct TcCategory TcCategory;

/**
 * The double of a category: simples and modular data.
 */
typedef struct TcDouble TcDouble;

/**
 * `D(G)` for a finite group with its Hopf-side modular data.
 */
typedef struct TcGroupDouble TcGroupDouble;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tc_last_error(char *buf, size_t len);

/**
 * Static description of a status code.
 */
const char *tc_status_string(enum TcStatus s);

/**
 * Parses a category from its JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TcStatus tc_category_from_json(const char *json, struct TcCategory **out);

/**
 * Loads a category file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TcStatus tc_category_load(const char *path, struct TcCategory **out);

/**
 * One of the bundled categories by file stem (`"fibonacci"`, `"vec_s3"`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum TcStatus tc_category_bundled(const char *name, struct TcCategory **out);

/**
 * # Safety
 * `cat` must be null or a handle from this library, not yet freed.
 */
void tc_category_free(struct TcCategory *cat);

/**
 * # Safety
 * `cat` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_category_rank(const struct TcCategory *cat, size_t *out);

/**
 * Runs the full validation; `passed` receives 1 or 0 and `pentagon` the
 * pentagon residual.
 *
 * # Safety
 * `cat` must be a live handle; the outputs must be writable.
 */
enum TcStatus tc_category_validate(const struct TcCategory *cat,
                                   double eps,
                                   int32_t *passed,
                                   double *pentagon);

/**
 * Tube algebra, simples of the double and modular data. Fails with
 * `ValidationFailed` if the input does not validate.
 *
 * # Safety
 * `cat` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_double_compute(const struct TcCategory *cat,
                                double eps,
                                uint64_t seed,
                                struct TcDouble **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not yet freed.
 */
void tc_double_free(struct TcDouble *d);

/**
 * Number of simples.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_double_rank(const struct TcDouble *d, size_t *out);

/**
 * 1 if every certificate of the analysis passes.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_double_certified(const struct TcDouble *d, int32_t *out);

/**
 * Dimension of simple `x`.
 *
 * # Safety
 * `d` must be a live handle; `re` and `im` must be writable.
 */
enum TcStatus tc_double_dim(const struct TcDouble *d, size_t x, double *re, double *im);

/**
 * Twist of simple `x`.
 *
 * # Safety
 * `d` must be a live handle; `re` and `im` must be writable.
 */
enum TcStatus tc_double_twist(const struct TcDouble *d, size_t x, double *re, double *im);

/**
 * Unnormalized `S(x, y)`, with `S(0, y) = d(y)`.
 *
 * # Safety
 * `d` must be a live handle; `re` and `im` must be writable.
 */
enum TcStatus tc_double_s(const struct TcDouble *d, size_t x, size_t y, double *re, double *im);

/**
 * Multiplicity of input simple `i` in double simple `x`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_double_multiplicity(const struct TcDouble *d, size_t x, size_t i, size_t *out);

/**
 * Gauss sums `Δ±` and the global dimension of the double.
 *
 * # Safety
 * `d` must be a live handle; all outputs must be writable.
 */
enum TcStatus tc_double_gauss(const struct TcDouble *d,
                              double *plus_re,
                              double *plus_im,
                              double *minus_re,
                              double *minus_im,
                              double *dim_re,
                              double *dim_im);

/**
 * JSON report of the analysis. Release the string with [`tc_string_free`].
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_double_report_json(const struct TcDouble *d, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void tc_string_free(char *s);

/**
 * `D(Z_n)`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TcStatus tc_group_double_cyclic(size_t n,
                                     double eps,
                                     uint64_t seed,
                                     struct TcGroupDouble **out);

/**
 * `D(S_n)` for `1 <= n <= 4`.
 *
 * # Safety
 * `out` must be writable.
 */
enum TcStatus tc_group_double_symmetric(size_t n,
                                        double eps,
                                        uint64_t seed,
                                        struct TcGroupDouble **out);

/**
 * `D(G)` from a group JSON document.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum TcStatus tc_group_double_from_json(const char *json,
                                        double eps,
                                        uint64_t seed,
                                        struct TcGroupDouble **out);

/**
 * # Safety
 * `g` must be null or a handle from this library, not yet freed.
 */
void tc_group_double_free(struct TcGroupDouble *g);

/**
 * Number of irreps.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_group_double_rank(const struct TcGroupDouble *g, size_t *out);

/**
 * Dimension and twist of irrep `x`.
 *
 * # Safety
 * `g` must be a live handle; the outputs must be writable.
 */
enum TcStatus tc_group_double_irrep(const struct TcGroupDouble *g,
                                    size_t x,
                                    double *dim,
                                    double *twist_re,
                                    double *twist_im);

/**
 * `(Tr_x ⊗ Tr_y)(R_21 R_12)`.
 *
 * # Safety
 * `g` must be a live handle; `re` and `im` must be writable.
 */
enum TcStatus tc_group_double_s(const struct TcGroupDouble *g,
                                size_t x,
                                size_t y,
                                double *re,
                                double *im);

/**
 * 1 if every Hopf-side certificate passes.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
enum TcStatus tc_group_double_certified(const struct TcGroupDouble *g, int32_t *out);

/**
 * Matches the double of a `Vec_G` category with `D(G)`. On success `perm`
 * (length = rank, may be null) receives the irrep matched to each simple.
 * Returns `NoMatching` if the data do not agree within `tol`.
 *
 * # Safety
 * Handles must be live; `perm` must be null or hold `rank` entries.
 */
enum TcStatus tc_compare(const struct TcDouble *d,
                         const struct TcGroupDouble *g,
                         double tol,
                         size_t *perm);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUBECENTER_H */
