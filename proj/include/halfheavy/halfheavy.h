/* C interface to the halfheavy library. All functions are thread-safe;
 * on failure they return a nonzero status and hh_last_error() describes
 * the failure for the calling thread. */
#ifndef HALFHEAVY_H
#define HALFHEAVY_H

#include <stdint.h>

#if defined(HALFHEAVY_BUILDING_LIBRARY)
#define HH_API __attribute__((visibility("default")))
#else
#define HH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  HH_OK = 0,
  HH_ERR_DOMAIN = 1,
  HH_ERR_INPUT = 2,
  HH_ERR_IO = 3,
  HH_ERR_NOT_CONVERGED = 4,
  HH_ACCEPTANCE_FAILED = 5,
  HH_ERR_INTERNAL = 6
} hh_status;

enum { HH_CLASS_REAL = 0, HH_CLASS_COMPLEX = 1 };
enum { HH_MODE_RAW = 0, HH_MODE_TRUNCATED = 1 };

typedef struct {
  double re;
  double im;
} hh_complex;

typedef struct {
  double alpha;
  double t0;
  double c;
  int symmetric;
} hh_dist_spec;

typedef struct {
  int64_t N;
  double beta;
  double epsilon;
  double mu_N;
  double sigma_N;
  double cutoff;
} hh_truncation;

typedef struct {
  int64_t N;
  double alpha;
  int symmetry_class;
  int mode;
  double epsilon;
  uint64_t seed;
} hh_ensemble_config;

typedef struct {
  double T_max; /* <= 0: automatic */
  int panels_per_decade;
  int points_per_panel;
  double t_min;
  double target_rel_err;
  int max_refinements;
  int threads;
} hh_quadrature;

typedef struct {
  hh_complex value;
  double est_abs_err;
  int converged;
  double kernel_constant;
} hh_kernel_value;

typedef struct hh_sample hh_sample;

HH_API const char* hh_version(void);
HH_API const char* hh_last_error(void);
HH_API const char* hh_status_string(hh_status status);

HH_API hh_status hh_calibrate(double alpha, hh_dist_spec* out);
HH_API hh_status hh_laplace_constant(const hh_dist_spec* dist, int symmetry_class, double* out);
HH_API hh_status hh_truncation_params(const hh_dist_spec* dist, int64_t N, double epsilon, hh_truncation* out);
/* truncation may be NULL (raw entries). */
HH_API hh_status hh_char_fn(const hh_dist_spec* dist, int64_t N, hh_complex lambda, const hh_truncation* truncation,
                            int symmetry_class, hh_complex* exact, hh_complex* expansion);
HH_API hh_status hh_g_sc(hh_complex z, hh_complex* out);

HH_API hh_quadrature hh_quadrature_defaults(void);
/* params may be NULL (defaults). Returns HH_ERR_NOT_CONVERGED, with *out
 * filled, when the refinement budget ran out before the target accuracy. */
HH_API hh_status hh_kernel_evaluate(hh_complex z, hh_complex zprime, const hh_dist_spec* dist,
                                    const hh_quadrature* params, int symmetry_class, hh_kernel_value* out);

HH_API hh_status hh_sample_build(const hh_ensemble_config* config, int64_t replicate_index, hh_sample** out);
HH_API void hh_sample_destroy(hh_sample* sample);
HH_API int64_t hh_sample_dim(const hh_sample* sample);
/* Writes dim ascending eigenvalues; capacity must be >= dim. */
HH_API hh_status hh_sample_eigenvalues(const hh_sample* sample, double* out, int64_t capacity);
HH_API hh_status hh_sample_trace_resolvent(const hh_sample* sample, hh_complex z, hh_complex* out);
/* k is 0-based. */
HH_API hh_status hh_sample_leave_one_out(const hh_sample* sample, hh_complex z, int64_t k, hh_complex* lhs,
                                         hh_complex* rhs, int* bound_ok);

/* Runs a CLI subcommand. config_json is a JSON object; overrides_json is a
 * JSON array of "key=value" strings or NULL; seed may be NULL; threads <= 0
 * keeps the configured value. HH_ACCEPTANCE_FAILED means the run finished
 * but at least one acceptance flag failed. */
HH_API hh_status hh_dispatch(const char* subcommand, const char* config_json, const char* out_dir,
                             const char* overrides_json, const uint64_t* seed, int threads);

#ifdef __cplusplus
}
#endif

#endif
