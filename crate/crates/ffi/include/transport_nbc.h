#ifndef TRANSPORT_NBC_H
#define TRANSPORT_NBC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum TnbcStatus {
  TNBC_OK = 0,
  TNBC_NULL_POINTER = 1,
  TNBC_INVALID_STENCIL = 2,
  TNBC_CFL = 3,
  TNBC_INVALID_PARAMETER = 4,
  TNBC_OUT_OF_RANGE = 5,
  TNBC_TOO_FEW_CELLS = 6,
  TNBC_WINDOW_TOO_SMALL = 7,
  TNBC_NOT_ZERO_SUM = 8,
  TNBC_INCONSISTENT = 9,
  TNBC_NO_CONVERGENCE = 10,
  TNBC_BUDGET = 11,
  TNBC_PARSE = 12,
  TNBC_BUFFER_TOO_SMALL = 13,
  TNBC_UTF8 = 14,
  TNBC_PANIC = 15
} TnbcStatus;

typedef struct TnbcStencil TnbcStencil;
typedef struct TnbcMatrix TnbcMatrix;

/* Copies the last error on this thread; returns its full length. */
size_t tnbc_last_error_message(char *buf, size_t len);
const char *tnbc_version(void);

TnbcStatus tnbc_stencil_builtin(const char *name, double a, double lambda, TnbcStencil **out);
TnbcStatus tnbc_stencil_new(size_t r, size_t p, const double *coeffs, double velocity, double lambda,
                            TnbcStencil **out);
TnbcStatus tnbc_stencil_parse(const char *text, TnbcStencil **out);
void tnbc_stencil_free(TnbcStencil *h);
TnbcStatus tnbc_stencil_info(const TnbcStencil *h, size_t *r, size_t *p, size_t *order);

TnbcStatus tnbc_energy_certificate(const TnbcStencil *h, double *d, size_t len, double *q_center);

TnbcStatus tnbc_run_interval(const TnbcStencil *h, const char *datum, double length, size_t cells, size_t kb,
                             double final_time, double *values, size_t len, double *out_time,
                             double *out_sup_error);

TnbcStatus tnbc_matrix_assemble(const TnbcStencil *h, size_t cells, size_t kb, TnbcMatrix **out);
void tnbc_matrix_free(TnbcMatrix *h);
size_t tnbc_matrix_dim(const TnbcMatrix *h);
TnbcStatus tnbc_matrix_copy_dense(const TnbcMatrix *h, double *buf, size_t len);
TnbcStatus tnbc_matrix_spectral_radius(const TnbcMatrix *h, double *out);
TnbcStatus tnbc_matrix_norm_l2(const TnbcMatrix *h, double *out, int32_t *converged);

#ifdef __cplusplus
}
#endif

#endif
