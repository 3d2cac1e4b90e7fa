#include <stdio.h>
#include <string.h>
#include "e8spread.h"

int main(void) {
    E8Pipeline *p = NULL;
    if (e8_pipeline_new(E8_CLASS_A, &p) != E8_STATUS_OK) {
        fprintf(stderr, "new: %s\n", e8_last_error());
        return 1;
    }
    uint8_t rows[4];
    if (e8_pipeline_spread_space(p, 0, rows) != E8_STATUS_OK) return 2;
    uint32_t ids[8];
    if (e8_pipeline_frame_roots(p, 8, 14, ids) != E8_STATUS_OK) return 3;
    if (e8_pipeline_frame_roots(p, 9, 0, ids) != E8_STATUS_INVALID_ARGUMENT) return 4;
    if (e8_last_error() == NULL) return 5;
    uint64_t order = 0;
    if (e8_pipeline_group_order(p, &order) != E8_STATUS_OK) return 6;
    printf("blocks %zu order %llu version %s\n", e8_pipeline_block_count(p), (unsigned long long)order, e8_version());
    e8_pipeline_free(p);
    return order == 362880ULL ? 0 : 7;
}
