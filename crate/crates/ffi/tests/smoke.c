#include <stdio.h>
#include "hybrid.h"

static const char *INSTANCE =
    "{\"kind\":\"matrix\",\"clients\":[0,1,2],\"facilities\":[3,4],\"k\":1,\"r\":0.0,"
    "\"dist\":[[0,1,2,1,3],[1,0,1,2,2],[2,1,0,3,1],[1,2,3,0,4],[3,2,1,4,0]]}";

int main(void) {
    HkInstance *inst = NULL;
    if (hk_instance_from_json(INSTANCE, &inst) != HK_STATUS_OK) {
        fprintf(stderr, "load: %s\n", hk_last_error());
        return 1;
    }
    double opt = -1.0;
    if (hk_brute_force(inst, &opt) != HK_STATUS_OK) return 2;
    HkSolution *sol = NULL;
    if (hk_solve(inst, 0.5, 20, 1, &sol) != HK_STATUS_OK) return 3;
    size_t centers[1];
    if (hk_solution_facilities(sol, centers, 1) != HK_STATUS_OK) return 4;
    double bad = 0.0;
    if (hk_cost(NULL, centers, 1, 0.0, 1.0, &bad) != HK_STATUS_NULL_POINTER) return 5;
    printf("opt=%g centers=%zu first=%zu\n", opt, hk_solution_len(sol), centers[0]);
    hk_solution_free(sol);
    hk_instance_free(inst);
    return 0;
}
