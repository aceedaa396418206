#include <math.h>
#include <stdio.h>

#include "onelevel.h"

int main(void) {
    OlOptimalG *g = NULL;
    if (ol_optimal_build(OL_GROUP_SO_EVEN, 1.2, &g) != OL_STATUS_OK) {
        fprintf(stderr, "build: %s\n", ol_last_error_message());
        return 1;
    }
    double residual = 0.0, bound = 0.0, corollary = 0.0;
    ol_optimal_verify(g, 1001, &residual);
    ol_infimum_bound(g, &bound);
    ol_corollary_bound(OL_GROUP_SO_EVEN, 1.2, &corollary);
    printf("residual %.3e bound %.12f corollary %.12f\n", residual, bound, corollary);

    OlOptimalG *bad = NULL;
    OlStatus st = ol_optimal_build(OL_GROUP_U, 1.2, &bad);
    printf("U: status %d (%s)\n", (int)st, ol_last_error_message());

    int ok = residual <= 1e-8 && fabs(bound - corollary) <= 1e-9 && st == OL_STATUS_UNSUPPORTED_GROUP && bad == NULL;
    ol_optimal_free(g);
    return ok ? 0 : 1;
}
