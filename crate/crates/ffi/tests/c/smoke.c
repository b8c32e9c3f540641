#include <math.h>
#include <stdio.h>
#include <stdlib.h>

#include "amgkit.h"

int main(void) {
    const size_t nx = 10, n = nx * nx * nx;
    double *b = malloc(n * sizeof *b);
    double *x = calloc(n, sizeof *x);
    AmgMatrix *a = NULL;
    AmgPrecond *p = NULL;
    AmgPrecondOptions opts;
    AmgSolveInfo info;

    if (amg_matrix_poisson7(nx, nx, nx, b, &a) != AMG_STATUS_OK) return 10;
    if (amg_precond_options_default(AMG_PRESET_VBM, &opts) != AMG_STATUS_OK) return 11;
    opts.coarse_size_target = 40;
    if (amg_precond_build(a, &opts, &p) != AMG_STATUS_OK) {
        fprintf(stderr, "%s\n", amg_last_error_message());
        return 12;
    }
    if (amg_solve(a, p, AMG_METHOD_FCG, n, b, x, 1e-8, 100, &info) != AMG_STATUS_OK) return 13;
    if (!info.converged || info.relative_residual > 1e-8) return 14;

    double *r = malloc(n * sizeof *r);
    for (size_t i = 0; i < n; i++) r[i] = b[i];
    amg_matrix_spmv(a, -1.0, x, 1.0, r);
    double rn = 0.0, bn = 0.0;
    for (size_t i = 0; i < n; i++) {
        rn += r[i] * r[i];
        bn += b[i] * b[i];
    }
    if (sqrt(rn / bn) > 1e-7) return 15;

    if (amg_precond_build(NULL, NULL, &p) != AMG_STATUS_NULL_POINTER) return 16;
    printf("levels=%zu iterations=%zu\n", amg_precond_levels(p), info.iterations);

    amg_precond_free(p);
    amg_matrix_free(a);
    free(b);
    free(x);
    free(r);
    return 0;
}
