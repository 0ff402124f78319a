#include <stdio.h>
#include "frobtrace.h"

int main(void) {
    FtField *f2 = NULL;
    if (ft_field_new(2, 1, NULL, 0, &f2) != FT_STATUS_OK) {
        fprintf(stderr, "%s\n", ft_last_error());
        return 1;
    }
    char *json = NULL;
    FtStatus st = ft_trace_matrix(f2, "x,y,z,w", NULL, "x^3+y^3+z^3+w^3:1", "H:1", 1, &json);
    if (st != FT_STATUS_OK) {
        fprintf(stderr, "status %d: %s\n", (int)st, ft_last_error());
        ft_field_free(f2);
        return 1;
    }
    printf("%s\n", json);
    ft_string_free(json);

    st = ft_fedder(f2, NULL, "x^3+y^", &json);
    printf("parse error status %d: %s\n", (int)st, ft_last_error());
    ft_field_free(f2);
    return 0;
}
