/* Plain C consumer of the public header. */
#include <math.h>
#include <stdio.h>

#include "rfeas/rfeas.h"

int main(void) {
  rfeas_problem* p = NULL;
  rfeas_psi* psi = NULL;
  const char* names[] = {"theta1", "theta2"};
  const double values[] = {2.5, 20.0};
  int rc = rfeas_problem_load_builtin("ex2", &p);
  if (rc != RFEAS_OK) {
    fprintf(stderr, "load failed: %s\n", rfeas_last_error());
    return 1;
  }
  rc = rfeas_psi_evaluate(p, names, values, 2, NULL, &psi);
  if (rc != RFEAS_OK || fabs(rfeas_psi_value(psi) + 13.25) > 1e-12) {
    fprintf(stderr, "unexpected psi\n");
    return 1;
  }
  rfeas_psi_free(psi);
  rfeas_problem_free(p);
  printf("ok\n");
  return 0;
}
