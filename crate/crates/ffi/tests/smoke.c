#include <stdio.h>
#include <stdlib.h>
#include "anticonc.h"

int main(void) {
    AcPolynomial *p = NULL;
    AcStatus st = ac_poly_parse("x1^2 + 3*x1*x2 - 1/2", 2, &p);
    if (st != AC_STATUS_OK) {
        fprintf(stderr, "parse failed: %s\n", ac_last_error());
        return 1;
    }
    double x[2] = {1.0, 2.0};
    double v = 0.0;
    ac_poly_evaluate(p, x, 2, &v);
    AcEstimate est;
    ac_variance_mc(p, "gaussian", 10000, 7, &est);
    printf("%s %g %g +- %g\n", ac_version(), v, est.value, est.std_error);

    char *text = ac_poly_to_string(p);
    puts(text);
    ac_string_free(text);
    ac_poly_free(p);

    double eta[8];
    uint64_t mult[8];
    size_t len = 0;
    ac_ball_spectrum_theoretical(3, 2, eta, mult, 8, &len);
    return len == 2 ? EXIT_SUCCESS : EXIT_FAILURE;
}
