#pragma once

#include "halfheavy/heavytail.hpp"
#include "halfheavy/types.hpp"

namespace halfheavy {

struct QuadratureParams {
  double T_max = 0.0;          // <= 0 selects 40 / min(|Im z|, |Im z'|)
  int panels_per_decade = 4;   // starting resolution; doubled per refinement
  int points_per_panel = 16;   // Gauss-Legendre nodes per panel
  double t_min = 1e-8;
  double target_rel_err = 1e-6;
  int max_refinements = 3;
  int threads = 1;
};

void validate(const QuadratureParams& p);

struct KernelValue {
  cplx z;
  cplx zprime;
  cplx value;
  double est_abs_err = 0.0;
  bool converged = false;
  QuadratureParams params;  // resolution actually used for `value`
  double alpha = 0.0;
  double c = 0.0;                // tail constant of the entry law
  double kernel_constant = 0.0;  // multiplier of the double integral (laplace_constant)
  double refinement_diff = 0.0;
  double tail_estimate = 0.0;   // part beyond T_max
  double head_estimate = 0.0;   // part below t_min
};

/// B * F * F' with B = (K+K')^{a/2} - K^{a/2} - K'^{a/2},
/// F = exp(sgn_z i t z - K), F' likewise.
cplx integrand_undiff(cplx z, cplx zp, double t, double tp, const DistSpec& dist);

/// d/dz d/dz' of integrand_undiff, in closed form.
cplx integrand_dd(cplx z, cplx zp, double t, double tp, const DistSpec& dist);

/// C(z, z') = -(k/2) * int int integrand_dd(z, z', t, t') dt dt' / (t t'),
/// k = laplace_constant(dist, cls), by tensor Gauss-Legendre on graded panels.
KernelValue evaluate_C(cplx z, cplx zp, const DistSpec& dist, const QuadratureParams& params,
                       SymmetryClass cls = SymmetryClass::real);

/// Independent check: same double integral, but d/dz d/dz' applied by a
/// central four-point difference of integrand_undiff with step fd_step.
/// Uses the resolution given in `params` without refinement.
cplx evaluate_C_oracle(cplx z, cplx zp, const DistSpec& dist, const QuadratureParams& params, double fd_step,
                       SymmetryClass cls = SymmetryClass::real);

}  // namespace halfheavy
