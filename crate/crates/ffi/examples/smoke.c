#include <stdio.h>
#include <string.h>

#include "anosov.h"

static const char *SANOV =
    "{\"dim\":2,\"factors\":["
    "{\"name\":\"F1\",\"generators\":[{\"label\":\"a\",\"exact\":{\"rows\":2,\"cols\":2,\"entries\":[\"1\",\"2\",\"0\",\"1\"]}}]},"
    "{\"name\":\"F2\",\"generators\":[{\"label\":\"b\",\"exact\":{\"rows\":2,\"cols\":2,\"entries\":[\"1\",\"0\",\"2\",\"1\"]}}]}]}";

int main(void) {
    AnosovRep *rep = NULL;
    if (anosov_rep_from_json(SANOV, &rep) != ANOSOV_STATUS_OK) {
        char *msg = anosov_last_error_message();
        fprintf(stderr, "parse failed: %s\n", msg ? msg : "?");
        anosov_string_free(msg);
        return 1;
    }
    size_t d = 0;
    anosov_rep_dim(rep, &d);
    printf("dim %zu\n", d);

    double re[4], im[4];
    if (anosov_rep_evaluate(rep, "a b", re, im, 4) != ANOSOV_STATUS_OK) return 1;
    printf("ab %g %g %g %g\n", re[0], re[1], re[2], re[3]);

    double sig[2];
    if (anosov_svd_sigmas(re, NULL, 2, sig) != ANOSOV_STATUS_OK) return 1;
    printf("sigma_1*sigma_2 %.6f\n", sig[0] * sig[1]);

    char *json = NULL;
    if (anosov_index_set_json(rep, 4, NULL, &json) != ANOSOV_STATUS_OK) return 1;
    printf("index_set %s\n", strstr(json, "\"indices\":[1]") ? "[1]" : "other");
    anosov_string_free(json);

    AnosovStatus s = anosov_rep_evaluate(rep, "c", re, im, 4);
    char *msg = anosov_last_error_message();
    printf("bad word status %d: %s\n", (int)s, msg ? msg : "");
    anosov_string_free(msg);

    AnosovRep *bad = NULL;
    s = anosov_rep_from_json("{\"dim\":", &bad);
    printf("bad json status %d null %d\n", (int)s, bad == NULL);

    anosov_rep_free(rep);
    printf("version %s\n", anosov_version());
    return 0;
}
