#ifndef GIANT_SCATTER_H
#define GIANT_SCATTER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_PARAMETER = 2,
  GS_STATUS_PORT_OUT_OF_RANGE = 3,
  GS_STATUS_SINGULAR_SYSTEM = 4,
  GS_STATUS_RESIDUAL = 5,
  GS_STATUS_UNSUPPORTED = 6,
  GS_STATUS_UNDEFINED_CONTRAST = 7,
  GS_STATUS_BUFFER_TOO_SMALL = 8,
  GS_STATUS_INTERNAL = 9,
} GsStatus;

/**
 * Opaque scattering model.
 */
typedef struct GsModel GsModel;

/**
 * Two-level atom on one waveguide, coupled at two points.
 */
typedef struct GsTwoLevelParams {
  double gamma_wg;
  double gamma_ext;
  double theta1;
  double theta2;
  double phi0;
  double tau;
} GsTwoLevelParams;

/**
 * ∇-type atom on two waveguides with a classical drive between the excited levels.
 */
typedef struct GsNablaParams {
  double gamma1_wg;
  double gamma2_wg;
  double gamma_e1;
  double gamma_e2;
  double rabi;
  double alpha;
  double theta1;
  double theta2;
  double theta3;
  double theta4;
  double phi_a0;
  double phi_b0;
  double tau_a;
  double tau_b;
} GsNablaParams;

/**
 * Δ-type atom on two waveguides with a drive between the lower levels.
 */
typedef struct GsDeltaParams {
  double gamma1_wg;
  double gamma2_wg;
  double gamma_g2;
  double gamma_e;
  double drive;
  double beta;
  double theta1;
  double theta2;
  double theta3;
  double theta4;
  double phi_a0;
  double phi_b0;
  double tau_a;
  double tau_b;
  double omega_g2;
} GsDeltaParams;

typedef struct GsComplex {
  double re;
  double im;
} GsComplex;

/**
 * Closed-form two-level amplitudes. `t`, `r` for incidence from the left,
 * `t_rev`, `r_rev` from the right, `u_fwd`, `u_rev` the atomic amplitudes.
 */
typedef struct GsTwoLevelAmplitudes {
  struct GsComplex t;
  struct GsComplex r;
  struct GsComplex t_rev;
  struct GsComplex r_rev;
  struct GsComplex u_fwd;
  struct GsComplex u_rev;
} GsTwoLevelAmplitudes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next
 * call into this library from the same thread.
 */
const char *gs_last_error(void);

struct GsTwoLevelParams gs_two_level_params_default(void);

struct GsNablaParams gs_nabla_params_default(void);

struct GsDeltaParams gs_delta_params_default(void);

/**
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
enum GsStatus gs_model_two_level(const struct GsTwoLevelParams *params, struct GsModel **out);

/**
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
enum GsStatus gs_model_nabla(const struct GsNablaParams *params, struct GsModel **out);

/**
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
enum GsStatus gs_model_delta(const struct GsDeltaParams *params, struct GsModel **out);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must come from a `gs_model_*` constructor and not be freed twice.
 */
void gs_model_free(struct GsModel *model);

/**
 * Number of ports, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a live handle.
 */
size_t gs_model_n_ports(const struct GsModel *model);

/**
 * Writes the n×n probability matrix row-major: entry `i*n + j` is the
 * probability from port `i+1` into port `j+1`.
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `len` doubles.
 */
enum GsStatus gs_s_matrix(const struct GsModel *model, double delta, double *out, size_t len);

/**
 * Same layout as [`gs_s_matrix`] with complex amplitudes.
 *
 * # Safety
 * `model` must be a live handle and `out` must hold `len` complex values.
 */
enum GsStatus gs_s_matrix_amplitudes(const struct GsModel *model,
                                     double delta,
                                     struct GsComplex *out,
                                     size_t len);

/**
 * # Safety
 * `params` must point to a valid struct and `out` to writable storage.
 */
enum GsStatus gs_two_level_amplitudes(const struct GsTwoLevelParams *params,
                                      double delta,
                                      struct GsTwoLevelAmplitudes *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* GIANT_SCATTER_H */
