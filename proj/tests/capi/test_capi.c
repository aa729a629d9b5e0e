/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "halfheavy/halfheavy.h"

static int failures = 0;

#define CHECK(cond)                                                  \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: CHECK(%s) failed\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                    \
    }                                                                \
  } while (0)

static int close_to(double a, double b, double tol) { return fabs(a - b) <= tol; }

static void test_distribution(void) {
  hh_dist_spec d;
  CHECK(hh_calibrate(3.0, &d) == HH_OK);
  const double t0 = sqrt(1.0 / 3.0);
  CHECK(close_to(d.t0, t0, 1e-15));
  CHECK(close_to(d.c, 6.0 * t0 * t0 * t0, 1e-14));
  CHECK(d.symmetric == 1);

  /* t0^3 Gamma(-1/2) = -2 sqrt(pi) / 3^{3/2} */
  double lc = 0.0;
  CHECK(hh_laplace_constant(&d, HH_CLASS_REAL, &lc) == HH_OK);
  CHECK(close_to(lc, -2.0 * sqrt(acos(-1.0)) / pow(3.0, 1.5), 1e-13));
  double lc_complex = 0.0;
  CHECK(hh_laplace_constant(&d, HH_CLASS_COMPLEX, &lc_complex) == HH_OK);
  CHECK(close_to(lc_complex, pow(2.0, -0.5) * lc, 1e-13));

  hh_dist_spec bad;
  CHECK(hh_calibrate(4.5, &bad) == HH_ERR_DOMAIN);
  CHECK(strlen(hh_last_error()) > 0);
  CHECK(hh_calibrate(3.0, NULL) == HH_ERR_INPUT);
  CHECK(strcmp(hh_status_string(HH_ERR_NOT_CONVERGED), "not converged") == 0);
  CHECK(strlen(hh_version()) > 0);

  hh_truncation tp;
  CHECK(hh_truncation_params(&d, 1000, 0.01, &tp) == HH_OK);
  CHECK(close_to(tp.beta, 0.25 * 1.75 + 0.01, 1e-15));
  CHECK(close_to(tp.cutoff, pow(1000.0, tp.beta), 1e-9));
  CHECK(tp.mu_N == 0.0);
  /* sigma^2 = 1 - alpha t0^alpha T^{2-alpha} / (alpha - 2) */
  CHECK(close_to(tp.sigma_N * tp.sigma_N, 1.0 - 3.0 * pow(t0, 3.0) / tp.cutoff, 1e-13));
  CHECK(hh_truncation_params(&d, 1, 0.01, &tp) == HH_ERR_INPUT);

  hh_complex exact, expansion;
  const hh_complex lambda = {0.0, -1.0};
  CHECK(hh_char_fn(&d, 1000, lambda, NULL, HH_CLASS_REAL, &exact, &expansion) == HH_OK);
  CHECK(fabs(exact.re - expansion.re) < 1e-4);
  CHECK(fabs(exact.im - expansion.im) < 1e-4);
  CHECK(hh_truncation_params(&d, 1000, 0.01, &tp) == HH_OK);
  CHECK(hh_char_fn(&d, 1000, lambda, &tp, HH_CLASS_REAL, &exact, &expansion) == HH_OK);
  CHECK(fabs(exact.re - expansion.re) < 1e-3);
  const hh_complex upper = {0.0, 1.0};
  CHECK(hh_char_fn(&d, 1000, upper, NULL, HH_CLASS_REAL, &exact, &expansion) == HH_ERR_DOMAIN);

  hh_complex g;
  const hh_complex z = {0.0, 2.0};
  CHECK(hh_g_sc(z, &g) == HH_OK);
  CHECK(close_to(g.re, 0.0, 1e-15));
  CHECK(close_to(g.im, 1.0 - sqrt(2.0), 1e-15));
}

static void test_kernel(void) {
  hh_dist_spec d;
  hh_calibrate(3.0, &d);
  const hh_complex z = {0.0, 2.0};
  const hh_complex zbar = {0.0, -2.0};
  hh_kernel_value kv;
  CHECK(hh_kernel_evaluate(z, zbar, &d, NULL, HH_CLASS_REAL, &kv) == HH_OK);
  CHECK(kv.converged == 1);
  CHECK(kv.value.re > 0.0);
  CHECK(fabs(kv.value.im) <= kv.est_abs_err + 1e-14);

  hh_quadrature q = hh_quadrature_defaults();
  CHECK(q.target_rel_err > 0.0);
  q.max_refinements = 1;
  q.target_rel_err = 1e-30;
  hh_kernel_value rough;
  memset(&rough, 0, sizeof rough);
  CHECK(hh_kernel_evaluate(z, z, &d, &q, HH_CLASS_REAL, &rough) == HH_ERR_NOT_CONVERGED);
  CHECK(rough.converged == 0);
  CHECK(rough.est_abs_err > 0.0);

  const hh_complex real_z = {1.0, 0.0};
  CHECK(hh_kernel_evaluate(real_z, z, &d, NULL, HH_CLASS_REAL, &kv) == HH_ERR_DOMAIN);
  q.max_refinements = 0;
  CHECK(hh_kernel_evaluate(z, z, &d, &q, HH_CLASS_REAL, &kv) == HH_ERR_INPUT);
}

static void test_sample(void) {
  hh_ensemble_config cfg = {50, 3.0, HH_CLASS_REAL, HH_MODE_RAW, 0.01, 42};
  hh_sample* s = NULL;
  CHECK(hh_sample_build(&cfg, 0, &s) == HH_OK);
  CHECK(s != NULL);
  CHECK(hh_sample_dim(s) == 50);

  double eig[50];
  double small[10];
  CHECK(hh_sample_eigenvalues(s, eig, 50) == HH_OK);
  CHECK(hh_sample_eigenvalues(s, small, 10) == HH_ERR_INPUT);
  for (int i = 1; i < 50; ++i) CHECK(eig[i - 1] <= eig[i]);

  const hh_complex z = {0.5, 0.8};
  hh_complex tr;
  CHECK(hh_sample_trace_resolvent(s, z, &tr) == HH_OK);
  double re = 0.0, im = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double dr = z.re - eig[i];
    const double den = dr * dr + z.im * z.im;
    re += dr / den;
    im -= z.im / den;
  }
  CHECK(close_to(tr.re, re, 1e-11));
  CHECK(close_to(tr.im, im, 1e-11));

  hh_complex lhs, rhs;
  int bound_ok = 0;
  CHECK(hh_sample_leave_one_out(s, z, 7, &lhs, &rhs, &bound_ok) == HH_OK);
  CHECK(hypot(lhs.re - rhs.re, lhs.im - rhs.im) < 1e-9 * hypot(rhs.re, rhs.im));
  CHECK(bound_ok == 1);
  CHECK(hh_sample_leave_one_out(s, z, 50, &lhs, &rhs, &bound_ok) == HH_ERR_INPUT);

  hh_sample_destroy(s);
  hh_sample_destroy(NULL);
  CHECK(hh_sample_dim(NULL) == 0);
  CHECK(hh_sample_trace_resolvent(NULL, z, &tr) == HH_ERR_INPUT);

  cfg.N = 1;
  s = (hh_sample*)1;
  CHECK(hh_sample_build(&cfg, 0, &s) != HH_OK);
  CHECK(s == NULL);
}

static void test_dispatch(void) {
  const char* dir = HH_TEST_OUT_DIR;
  CHECK(hh_dispatch("calibrate", "{\"alpha\": 3.0, \"N_list\": [64]}", dir, NULL, NULL, 0) == HH_OK);
  char path[1024];
  snprintf(path, sizeof path, "%s/dist.json", dir);
  FILE* f = fopen(path, "r");
  CHECK(f != NULL);
  if (f) fclose(f);

  CHECK(hh_dispatch("nonsense", "{\"alpha\": 3.0}", dir, NULL, NULL, 0) == HH_ERR_INPUT);
  CHECK(hh_dispatch("calibrate", "{not json", dir, NULL, NULL, 0) == HH_ERR_INPUT);
  CHECK(hh_dispatch("calibrate", "{}", dir, NULL, NULL, 0) == HH_ERR_INPUT);
  CHECK(hh_dispatch("calibrate", "{\"alpha\": 1.5}", dir, NULL, NULL, 0) == HH_ERR_DOMAIN);
  CHECK(hh_dispatch("calibrate", "{\"alpha\": 2.5}", dir, "[\"alpha=3.5\"]", NULL, 0) == HH_OK);
  CHECK(hh_dispatch(NULL, "{}", dir, NULL, NULL, 0) == HH_ERR_INPUT);
}

int main(void) {
  test_distribution();
  test_kernel();
  test_sample();
  test_dispatch();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C interface checks passed\n");
  return 0;
}
