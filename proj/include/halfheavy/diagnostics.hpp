#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "halfheavy/ensemble.hpp"
#include "halfheavy/spectral.hpp"
#include "halfheavy/types.hpp"

namespace halfheavy {

struct IdentitySuite {
  std::int64_t triples = 0;
  double max_rel_residual = 0.0;  // |lhs - rhs| / |rhs| over all triples
  bool all_bound_ok = true;
  bool all_sign_ok = true;
};

/// Leave-one-out identity on `triples` random (N, z, k) draws with
/// 8 <= N <= N_max, 0.1 <= |Im z| <= 2, |Re z| <= 3.
IdentitySuite leave_one_out_suite(const EnsembleConfig& base, std::int64_t triples, std::int64_t N_max,
                                  std::uint64_t seed);

struct BranchSuite {
  std::int64_t z_points = 0;
  std::int64_t t_points = 0;
  double max_quadratic_residual = 0.0;    // |G^2 - zG + 1|
  double max_fixed_point_residual = 0.0;  // |1/(z - G) - G|
  double min_re_K = 0.0;
};

/// g_sc and K(z, t) on a grid of `grid` values of z (|Re z| <= 4,
/// 1e-2 <= |Im z| <= 3, both half planes) times `grid` log-spaced t in [1e-6, 1e3].
BranchSuite branch_suite(int grid = 20);

struct PhiGaps {
  cplx lambda;
  std::vector<std::int64_t> N;
  std::vector<double> scaled_gap;  // N^{alpha/2} |exact - expansion|
  bool decreasing = false;
};

PhiGaps phi_expansion_gaps(const DistSpec& dist, cplx lambda, const std::vector<std::int64_t>& Ns,
                           EntryMode mode = EntryMode::raw, double epsilon = 0.01,
                           SymmetryClass cls = SymmetryClass::real);

struct QuadraticFormCheck {
  std::int64_t N = 0;
  cplx z;
  QuadraticFormStats stats;
  bool pass_X = false;  // EX2_hat <= boundX + 4 stderr
  bool pass_E = false;  // EE2_hat <= boundE + 4 stderr
};

/// G = (z - A)^{-1} for one truncated real sample A, then Monte Carlo of
/// the quadratic forms with fresh truncated vectors.
QuadraticFormCheck quadratic_form_check(const DistSpec& dist, std::int64_t N, cplx z, double epsilon,
                                        std::int64_t draws, std::uint64_t seed);

struct DiagConcentrationCheck {
  cplx z;
  std::map<std::int64_t, double> mean_max_dev;
  std::int64_t replicates = 0;
  bool strictly_decreasing = false;
};

DiagConcentrationCheck diag_concentration_check(const EnsembleConfig& base, const std::vector<std::int64_t>& Ns,
                                                std::int64_t replicates, cplx z, int threads);

struct ExceedanceCheck {
  std::int64_t N = 0;
  std::int64_t replicates = 0;
  double mean_observed = 0.0;
  double expected = 0.0;
  bool pass = false;  // |mean_observed - expected| <= 4 sqrt(expected)
};

ExceedanceCheck exceedance_check(const EnsembleConfig& base, std::int64_t replicates);

}  // namespace halfheavy
