#ifndef NLSIST_H
#define NLSIST_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of the C interface.
 */
typedef enum NlsistStatus {
  NLSIST_STATUS_OK = 0,
  NLSIST_STATUS_NULL_POINTER = 1,
  NLSIST_STATUS_INVALID_ARGUMENT = 2,
  NLSIST_STATUS_NON_GENERIC = 3,
  NLSIST_STATUS_SPECTRUM_FAILURE = 4,
  NLSIST_STATUS_ILL_CONDITIONED = 5,
  NLSIST_STATUS_ACCURACY = 6,
  NLSIST_STATUS_IO = 7,
  NLSIST_STATUS_PARSE = 8,
  NLSIST_STATUS_PANIC = 9,
} NlsistStatus;

/**
 * Sampled complex field on a uniform grid.
 */
typedef struct NlsistField NlsistField;

/**
 * Reflection coefficient samples plus discrete spectrum.
 */
typedef struct NlsistSpectral NlsistSpectral;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *nlsist_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nlsist_version(void);

/**
 * Create a field from `n` interleaved samples on `[x_min, x_max]`.
 *
 * # Safety
 * `values` must point to `2 n` doubles and `out` to writable storage.
 */
enum NlsistStatus nlsist_field_new(double x_min,
                                   double x_max,
                                   uintptr_t n,
                                   const double *values,
                                   struct NlsistField **out);

/**
 * Release a field; null is ignored.
 *
 * # Safety
 * `field` must come from this library and not be used afterwards.
 */
void nlsist_field_free(struct NlsistField *field);

/**
 * Grid of a field.
 *
 * # Safety
 * All pointers must be valid.
 */
enum NlsistStatus nlsist_field_grid(const struct NlsistField *field,
                                    double *x_min,
                                    double *x_max,
                                    uintptr_t *n);

/**
 * Copy the samples into `out`, which holds `2 n` doubles.
 *
 * # Safety
 * `out` must point to `2 n` writable doubles.
 */
enum NlsistStatus nlsist_field_values(const struct NlsistField *field, double *out, uintptr_t n);

/**
 * Load a field from a binary container or `.csv` file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum NlsistStatus nlsist_field_load(const char *path, struct NlsistField **out);

/**
 * Save a field; the format follows the extension (`.csv` or binary).
 *
 * # Safety
 * `field` and `path` must be valid.
 */
enum NlsistStatus nlsist_field_save(const struct NlsistField *field, const char *path);

/**
 * Split-step evolution of `u0` to time `t` with step `dt`; `fourth_order`
 * selects the fourth-order splitting.
 *
 * # Safety
 * `u0` must be valid and `out` writable.
 */
enum NlsistStatus nlsist_evolve_reference(const struct NlsistField *u0,
                                          double dt,
                                          double t,
                                          int fourth_order,
                                          struct NlsistField **out);

/**
 * Direct scattering of `u` with `r` sampled on `n_z` points of `[z_min, z_max]`.
 *
 * # Safety
 * `u` must be valid and `out` writable.
 */
enum NlsistStatus nlsist_scatter(const struct NlsistField *u,
                                 double z_min,
                                 double z_max,
                                 uintptr_t n_z,
                                 struct NlsistSpectral **out);

/**
 * Release spectral data; null is ignored.
 *
 * # Safety
 * `data` must come from this library and not be used afterwards.
 */
void nlsist_spectral_free(struct NlsistSpectral *data);

/**
 * Number of discrete eigenvalues.
 *
 * # Safety
 * `data` and `count` must be valid.
 */
enum NlsistStatus nlsist_spectral_eigen_count(const struct NlsistSpectral *data, uintptr_t *count);

/**
 * Eigenpair `k` as `z_re, z_im, c_re, c_im`.
 *
 * # Safety
 * `out` must point to 4 writable doubles.
 */
enum NlsistStatus nlsist_spectral_eigenpair(const struct NlsistSpectral *data,
                                            uintptr_t k,
                                            double *out);

/**
 * Reflection samples; `n` must equal the z-grid length.
 *
 * # Safety
 * `out` must point to `2 n` writable doubles.
 */
enum NlsistStatus nlsist_spectral_reflection(const struct NlsistSpectral *data,
                                             double *out,
                                             uintptr_t n);

/**
 * Spectral data at time `t`; `convention` 0 selects the default sign
 * pair, 1 the opposite one.
 *
 * # Safety
 * `data` must be valid and `out` writable.
 */
enum NlsistStatus nlsist_spectral_evolve(const struct NlsistSpectral *data,
                                         double t,
                                         int convention,
                                         struct NlsistSpectral **out);

/**
 * Potential reconstructed by RH solves at the `n` points `xs`.
 *
 * # Safety
 * `xs` must hold `n` doubles and `out` `2 n` writable doubles.
 */
enum NlsistStatus nlsist_reconstruct(const struct NlsistSpectral *data,
                                     const double *xs,
                                     uintptr_t n,
                                     double *out);

/**
 * One-soliton potential with data `(z1, c1)` at `(t, x)`, written to `out[2]`.
 *
 * # Safety
 * `out` must point to 2 writable doubles.
 */
enum NlsistStatus nlsist_soliton(double z1_re,
                                 double z1_im,
                                 double c1_re,
                                 double c1_im,
                                 double t,
                                 double x,
                                 double *out);

/**
 * Parabolic cylinder function `D_a(z)`, written to `out[2]`.
 *
 * # Safety
 * `out` must point to 2 writable doubles.
 */
enum NlsistStatus nlsist_parabolic_cylinder(double a_re,
                                            double a_im,
                                            double z_re,
                                            double z_im,
                                            double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NLSIST_H */
