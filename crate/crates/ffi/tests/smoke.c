#include <math.h>
#include <stdio.h>
#include <string.h>

#include "einclass.h"

int main(void) {
    EinclassMetric *m = NULL;
    if (einclass_metric_from_catalog("de_sitter_flat", "H=1", &m) != EINCLASS_STATUS_OK) {
        fprintf(stderr, "%s\n", einclass_last_error());
        return 1;
    }
    double p[4] = {0.1, 0.2, -0.3, 0.4};
    EinclassVerdict v;
    if (einclass_classify_point(m, p, 0.0, 0.0, &v) != EINCLASS_STATUS_OK) return 2;
    if (v.label != EINCLASS_LABEL_PARALLEL || fabs(v.scalar - 12.0) > 1e-9) return 3;
    double far[4] = {0.0, 0.0, 0.0, 9.0};
    if (einclass_classify_point(m, far, 0.0, 0.0, &v) != EINCLASS_STATUS_DOMAIN) return 4;
    if (strlen(einclass_last_error()) == 0) return 5;
    einclass_metric_free(m);
    printf("ok %s\n", einclass_version());
    return 0;
}
