#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "halfheavy/ensemble.hpp"
#include "halfheavy/heavytail.hpp"
#include "halfheavy/types.hpp"

namespace halfheavy {

/// Tr G(z_j) (and optionally diag G(z_j)) for one replicate over a z-grid.
struct SpectralTrace {
  std::vector<cplx> z_grid;
  std::vector<cplx> traces;
  std::vector<Eigen::VectorXcd> diag;  // empty unless requested
  std::int64_t replicate_index = 0;
  std::int64_t N = 0;
};

std::vector<double> eigenvalues(const MatrixSample& sample);

struct EigenDecomposition {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;  // columns
};
EigenDecomposition eigendecomposition(const MatrixSample& sample);

/// sum_i 1/(z - lambda_i).
cplx trace_resolvent(std::span<const double> eigs, cplx z);

/// One eigendecomposition, then Tr G at every grid point.
SpectralTrace spectral_trace(const MatrixSample& sample, std::span<const cplx> z_grid);

/// Diagonal of (z - A)^{-1} from an LU factorisation of z - A.
Eigen::VectorXcd resolvent_diag(const MatrixSample& sample, cplx z);

/// Principal minor with row and column k removed.
Eigen::MatrixXcd remove_row_col(const Eigen::MatrixXcd& a, std::int64_t k);

struct LeaveOneOut {
  cplx lhs;              // Tr G - Tr G^(k), from two eigendecompositions
  cplx rhs;              // Schur-complement closed form
  cplx denominator;      // z - h_kk - a_k^* G^(k) a_k
  bool bound_ok = false;  // |lhs| <= pi / |Im z|
  bool sign_ok = false;   // Im(denominator) has the sign of Im z and |Im| >= |Im z|
};

/// k is 0-based.
LeaveOneOut leave_one_out(const MatrixSample& sample, cplx z, std::int64_t k);

struct QuadraticFormStats {
  double EX2_hat = 0.0;
  double EE2_hat = 0.0;
  double boundX = 0.0;
  double boundE = 0.0;
  double X_stderr = 0.0;  // standard error of EX2_hat
  double E_stderr = 0.0;
  double moment_constant = 0.0;  // C used in boundE
  std::int64_t draws = 0;
};

/// Monte Carlo E|X|^2, E|E|^2 for X = sum_{i!=j} G_ij conj(a_i) a_j and
/// E = sum_i G_ii |a_i|^2 - Tr G / N with a_i i.i.d. truncated, centred,
/// variance 1/N entries (real class).
QuadraticFormStats quadratic_form_stats(const Eigen::MatrixXcd& G, const DistSpec& dist, double epsilon,
                                        std::int64_t n_draws, std::mt19937_64& rng);

/// Ensemble mean of max_j |G(z)_jj - G_sc(z)| per N.
class DiagConcentration {
 public:
  explicit DiagConcentration(cplx z);
  void add(const MatrixSample& sample);
  void add_diagonal(std::int64_t N, const Eigen::VectorXcd& diag);
  std::map<std::int64_t, double> mean_max_dev() const;
  std::map<std::int64_t, std::int64_t> counts() const;

 private:
  cplx z_;
  cplx gsc_;
  std::map<std::int64_t, std::pair<double, std::int64_t>> acc_;
};

std::map<std::int64_t, double> diag_concentration(std::span<const MatrixSample> samples, cplx z);

struct FkStatistic {
  cplx full;
  cplx diag_only;
};

/// Full vs diagonal-only resolvent quadratic-form statistic for row k (0-based).
FkStatistic fk_statistic(const MatrixSample& sample, cplx z, std::int64_t k);

/// Same, from an explicit minor A^(k), column a_k and diagonal entry a_kk.
FkStatistic fk_statistic(const Eigen::MatrixXcd& minor, const Eigen::VectorXcd& column, cplx a_kk, cplx z);

}  // namespace halfheavy
